#pragma once

#include <functional>
#include <vector>

#include "asep/common.hpp"

namespace asep {

// Ai and Ai' from the wedge integral (1/2 pi i) int e^{t^3/3 - z t} dt over
// rays at angles -+pi/3 through a vertex at the real saddle point.
cplx airy_ai(cplx z, int nodes_per_ray = 96);
cplx airy_ai_prime(cplx z, int nodes_per_ray = 96);

struct KernelSpec {
  double x = 0.0;
  double ray_length = 8.0;
  int nodes_per_ray = 96;
  // false uses 2u / (u^2 - v^2); true keeps the printed 2v / (u^2 - v^2),
  // whose determinant is not a distribution function.
  bool printed_sign = false;
};

struct NystromGrid {
  double lower = 0.0;
  double span = 10.0;
  int n = 40;
};

// Kernel K^{2->1}(lambda, lambda') as printed (including the gauge factor
// e^{a (lambda - lambda')}, a = 2^{-1/3} x, that the determinant ignores).
cplx k2to1(double lambda, double lambda_prime, const KernelSpec& spec);

// Row-major n x n kernel on the given points, in the gauge used for
// determinants. Sets *truncated when a ray end is not negligible.
using KernelFill = std::function<std::vector<cplx>(const std::vector<double>& pts)>;
std::vector<cplx> k2to1_matrix(const std::vector<double>& pts, const KernelSpec& spec, bool* truncated = nullptr);

// det(I - sqrt(w_i) K(xi_i, xi_j) sqrt(w_j)) on Gauss-Legendre nodes of
// [lower, lower + span].
double fredholm_det(const KernelFill& kernel, const NystromGrid& grid);

struct AiryOracles {
  double f_airy2 = 0.0;  // det(I - K_Ai) on (s, inf)
  double f_airy1 = 0.0;  // det(I - B) on (s, inf), B(x, y) = Ai(x + y)
};

AiryOracles airy_oracles(double s);

// det(I - K^{2->1}) on [2^{1/3} r, inf), the predicted limit of
// P((h - t/2 - t^{1/3} x^2 1_{x<=0}) / t^{1/3} >= -r).
double halfflat_limit_cdf(double x, double r, const KernelSpec& spec = {}, const NystromGrid& grid = {});

}  // namespace asep
