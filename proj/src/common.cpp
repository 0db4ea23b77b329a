#include "asep/common.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace asep {

namespace {
int g_cap = 0;
int g_default = 0;
}  // namespace

void set_worker_cap(int n) {
  if (g_default == 0) g_default = omp_get_max_threads();
  g_cap = n > 0 ? n : 0;
  omp_set_num_threads(g_cap > 0 ? g_cap : g_default);
}

int worker_cap() { return g_cap; }

void apply_thread_env() {
  const char* s = std::getenv("ASEP_EXACT_THREADS");
  if (!s || !*s) return;
  try {
    set_worker_cap(std::stoi(s));
  } catch (const std::exception&) {
    throw DomainError(std::string("ASEP_EXACT_THREADS is not an integer: ") + s);
  }
}

}  // namespace asep
