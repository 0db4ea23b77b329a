#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asep/common.hpp"
#include "asep/qfunc.hpp"
#include "asep/quad.hpp"

namespace asep {

struct Composition {
  std::vector<int> parts;
  int weight() const;
};

struct Partition {
  std::vector<int> parts;  // nonincreasing
  int length() const { return static_cast<int>(parts.size()); }
  std::vector<int> multiplicities() const;  // index a holds m_a, a >= 1
};

// Lexicographic order.
std::vector<Composition> compositions(int m, int k);
std::vector<Partition> partitions(int k);

// nodes = 0 picks a per-contour node count from the analyticity annulus.
struct EvalParams {
  ModelParams params;
  QTruncation trunc;
  QuadratureRule rule;
  int nodes = 0;
  int max_nodes = 512;
  bool parallel = true;
};

cplx eps(cplx xi, const ModelParams& mp);
cplx eps_tilde(cplx z, const ModelParams& mp);
cplx eps_hat(cplx y, const ModelParams& mp);

// Integrand factor f_{x,t} of the Qtilde formula and the kernel F_{x,t} of
// the nested formula, both with the literal x - 1 exponent.
cplx f_xt(cplx z, int x, double t, const ModelParams& mp);
cplx big_f_xt(cplx y, int x, double t, const ModelParams& mp);

// E[Qtilde_{x_1} ... Qtilde_{x_k}](t).
MomentResult qtilde_moments(const std::vector<int>& xs, double t, const EvalParams& ev);
// Same integral without the ordering check; used on boundary configurations.
MomentResult qtilde_integral(const std::vector<int>& xs, double t, const EvalParams& ev);

double qtilde_initial(const std::vector<int>& xs, double tau);

struct AnsatzReport {
  double ode_residual = 0.0;
  double boundary_residual = 0.0;
  double initial_residual = 0.0;
  bool richardson_used = false;
  std::vector<std::vector<int>> boundary_configs;
};

AnsatzReport verify_ansatz(const std::vector<int>& xs, double t, const EvalParams& ev, double dt = 1e-4);

// E[tau^{k N_x(t)}] for half-flat data, three representations.
MomentResult nested_moment(int k, int x, double t, const EvalParams& ev);
MomentResult partition_moment(int k, int x, double t, const EvalParams& ev);
cplx halfflat_nu(int k, int m, int x, double t, const EvalParams& ev, double* err = nullptr);
MomentResult halfflat_moment(int m, int x, double t, const EvalParams& ev);

struct LaplaceResult {
  cplx value;
  double tail_estimate = 0.0;
  double err_estimate = 0.0;
  std::vector<cplx> per_k;  // contribution of each k (index 0 is the constant 1)
  bool truncation_warning = false;
  std::string note;
};

// Sum over m <= m_max of zeta^m E[tau^{m N}] / m_tau!, regrouped by k <= k_cap.
LaplaceResult tau_laplace_series(cplx zeta, int x, double t, int m_max, const EvalParams& ev, int k_cap = 4);

struct MbOptions {
  double delta = 0.7;
  double radius = 0.0;  // 0 picks a radius in (1, tau^{-delta/2})
  double T = 7.5;
  double h = 0.1;
  int nodes = 128;
};

LaplaceResult tau_laplace_mb(cplx zeta, int x, double t, int k_max, const EvalParams& ev, const MbOptions& opt = {});

// Scalar Mellin-Barnes sanity case: (1/2 pi i) int pi/sin(-pi s) (-zeta)^s g(tau^s) ds
// along Re s = delta equals sum_{n >= 1} zeta^n g(tau^n) for g = 1.
cplx mb_geometric(cplx zeta, double delta, double T, double h);

struct Configuration {
  int left = 0;
  std::vector<std::uint8_t> eta;
  int n_upto(int x) const;
};

struct DualityGap {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

DualityGap duality_identity_check(const Configuration& eta, int x, int k, double tau);

double symmetrization_gap(int k, double tau, int samples, std::uint64_t seed);
double lemma_magic_gap(int n, int samples, std::uint64_t seed);

}  // namespace asep
