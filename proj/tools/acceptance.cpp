// Runs acceptance criteria 1-8 and prints one PASS/FAIL line per criterion.
//   acceptance [--tol-scale S] [--only 3,6]

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "asep/common.hpp"
#include "asep/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance battery"};
  double scale = 1.0;
  std::vector<int> only;
  app.add_option("--tol-scale", scale)->check(CLI::PositiveNumber);
  app.add_option("--only", only)->delimiter(',')->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  asep::apply_thread_env();
  if (only.empty()) only = asep::suite_criteria("all");

  int failed = 0;
  for (int id : only) {
    asep::CriterionResult r = asep::run_criterion(id, scale);
    std::printf("criterion %d [%s] %s  (%.1f s)\n", id, r.title.c_str(), r.pass() ? "PASS" : "FAIL", r.seconds);
    for (const asep::Check& c : r.checks) {
      std::printf("    %-4s %-48s %.3e  tol %.1e", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.tol);
      if (!c.detail.empty()) std::printf("  %s", c.detail.c_str());
      std::printf("\n");
    }
    std::fflush(stdout);
    if (!r.pass()) ++failed;
  }
  std::printf("%d of %zu criteria passed (tol-scale %g)\n", static_cast<int>(only.size()) - failed, only.size(), scale);
  return failed ? 1 : 0;
}
