#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace asep {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PoleError : std::domain_error {
  using std::domain_error::domain_error;
};

// Node-count or state-space budgets exceeded.
struct GuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A result failed an internal consistency check (e.g. a real quantity came
// out with a non-negligible imaginary part).
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caps the OpenMP worker count; 0 restores the runtime default.
// Results never depend on this setting.
void set_worker_cap(int n);
int worker_cap();

// Reads ASEP_EXACT_THREADS and applies it.
void apply_thread_env();

}  // namespace asep
