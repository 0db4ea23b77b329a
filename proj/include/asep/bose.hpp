#pragma once

#include <vector>

#include "asep/common.hpp"
#include "asep/quad.hpp"

namespace asep {

// Complex Gamma by a Lanczos approximation (g = 7, 9 terms), reflected for
// Re z < 1/2.
cplx log_gamma(cplx z);
cplx gamma_fn(cplx z);
// 1 / Gamma(z); exactly zero at the poles.
cplx rgamma(cplx z);

struct BoseParams {
  double theta = 0.0;
  // Re z_a for the tilted and narrow-wedge formulas. Empty picks
  // 1/2 + 3(k - a)/2, shifted right by theta.
  std::vector<double> alpha_ladder;
  double alpha = 0.5;  // common line of the collapsed formula
};

// Gauss-Legendre panels of length 1 on the vertical lines.
QuadratureRule bose_rule();

// Half-length of the truncated vertical lines.
double bose_line_half_length(double t, double theta, double tail_cut);

double normal_cdf(double x);
double heat_kernel(double t, double x);

// Tilted half-flat delta Bose gas, x_1 < ... < x_k, k <= 3.
MomentResult delta_bose_moment(const std::vector<double>& xs, double t, const BoseParams& bp,
                               const QuadratureRule& rule = bose_rule());

// Narrow-wedge solution, x_1 < ... < x_k, k <= 3.
MomentResult narrow_wedge_moment(const std::vector<double>& xs, double t, const QuadratureRule& rule = bose_rule(),
                                 const std::vector<double>& alpha_ladder = {});

// v(t; x, ..., x) from the composition sum on a common line Re w = alpha.
MomentResult she_halfflat_moment_collapsed(int k, double x, double t, const BoseParams& bp,
                                           const QuadratureRule& rule = bose_rule());

// One composition term (without the 2^k k! / l! prefactor); used for the
// part-permutation symmetry check.
cplx collapsed_term(const std::vector<int>& parts, double x, double t, const BoseParams& bp,
                    const QuadratureRule& rule = bose_rule());

struct WeylReport {
  double gap = 0.0;
  cplx weyl;
  cplx collapsed;
  double lower = 0.0;  // chamber cut y_a > lower
  bool truncation_warning = false;
};

// k! times the narrow-wedge solution integrated over the truncated Weyl
// chamber against prod e^{-theta (x - y_a)}, compared with the collapsed
// formula. k in {1, 2}.
WeylReport weyl_linearity_check(int k, double x, double t, double theta, const QuadratureRule& rule = bose_rule(),
                                int outer_nodes = 96);

}  // namespace asep
