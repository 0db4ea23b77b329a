#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "asep/common.hpp"
#include "asep/qfunc.hpp"

namespace asep {

// Trapezoid circle. A nonzero cluster strength reparametrizes the angle by
// theta(s) = s - (beta/m) sin(m (s - phase)), packing nodes near the
// m angles phase + 2 pi j / m.
struct Circle {
  cplx center;
  double radius = 1.0;
  int orientation = 1;
  double cluster_strength = 0.0;
  int cluster_folds = 2;
  double cluster_phase = 0.0;
};

struct Segment {
  cplx z0;
  cplx z1;
};

// Circular arc from angle theta0 to theta1 (counterclockwise if theta1 > theta0).
struct Arc {
  cplx center;
  double radius = 1.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
};

// direction +1 runs away from the origin, -1 runs toward it.
struct Ray {
  cplx origin;
  double angle = 0.0;
  double length = 8.0;
  int direction = 1;
};

using Piece = std::variant<Circle, Segment, Arc, Ray>;

struct Contour {
  std::vector<Piece> pieces;
  bool closed() const;
};

struct QuadratureRule {
  int nodes_per_piece = 64;
  double tail_cut = 1e-16;
  double panel_length = 0.5;
};

// A node carries dz (not divided by 2 pi i).
struct Node {
  cplx z;
  cplx w;
};

using NodeSet = std::vector<Node>;

enum class Method { closed, path, product, nested, partition, halfflat, qtilde, series, mellin_barnes, bose, other };

std::string method_name(Method m);

struct MomentResult {
  cplx value;
  double err_estimate = 0.0;
  Method method = Method::other;
  std::vector<int> node_counts;
  bool truncation_warning = false;
  std::string note;
};

// Gauss-Legendre nodes and weights on [-1,1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

NodeSet discretize(const Piece& piece, const QuadratureRule& rule);
NodeSet discretize(const Contour& c, const QuadratureRule& rule);

template <class F>
cplx integrate_closed(F&& f, const Circle& c, int n) {
  if (n < 8) throw DomainError("integrate_closed needs n >= 8");
  QuadratureRule r;
  r.nodes_per_piece = n;
  cplx s = 0.0;
  for (const Node& nd : discretize(Piece{c}, r)) s += f(nd.z) * nd.w;
  return s / two_pi_i;
}

template <class F>
MomentResult integrate_path(F&& f, const Contour& c, const QuadratureRule& rule) {
  MomentResult res;
  res.method = Method::path;
  cplx total = 0.0;
  for (const Piece& p : c.pieces) {
    NodeSet ns = discretize(p, rule);
    cplx s = 0.0;
    for (const Node& nd : ns) s += f(nd.z) * nd.w;
    total += s;
    res.node_counts.push_back(static_cast<int>(ns.size()));
    if (std::holds_alternative<Ray>(p) && !ns.empty()) {
      // Ray nodes are ordered from the origin outward.
      const Node& far = ns.back();
      if (std::abs(f(far.z)) > rule.tail_cut * std::max(1.0, std::abs(s))) res.truncation_warning = true;
    }
  }
  res.value = total / two_pi_i;
  return res;
}

// Deterministic tensor-product summation. term(idx) returns the weighted
// summand at multi-index idx (length dims.size()). The flattened grid is cut
// into fixed blocks that are summed serially in row-major order; blocks are
// then combined by a pairwise tree, so the result does not depend on the
// number of workers.
inline constexpr std::int64_t kBlock = 4096;

cplx pairwise_sum(std::vector<cplx>& v);

template <class T>
cplx tensor_sum_impl(const std::vector<int>& dims, T&& term, bool parallel) {
  const int k = static_cast<int>(dims.size());
  std::int64_t total = 1;
  for (int d : dims) total *= d;
  if (total == 0) return 0.0;
  const std::int64_t nblocks = (total + kBlock - 1) / kBlock;
  std::vector<cplx> partial(static_cast<std::size_t>(nblocks));
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    std::array<int, 16> idx{};
    std::int64_t lin = b * kBlock;
    for (int a = k - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(lin % dims[a]);
      lin /= dims[a];
    }
    const std::int64_t end = std::min(total, (b + 1) * kBlock);
    cplx s = 0.0;
    for (std::int64_t i = b * kBlock; i < end; ++i) {
      s += term(idx.data());
      for (int a = k - 1; a >= 0; --a) {
        if (++idx[a] < dims[a]) break;
        idx[a] = 0;
      }
    }
    partial[static_cast<std::size_t>(b)] = s;
  }
  return pairwise_sum(partial);
}

template <class T>
cplx tensor_sum(const std::vector<int>& dims, T&& term) {
  return tensor_sum_impl(dims, term, true);
}

template <class T>
cplx tensor_sum_serial(const std::vector<int>& dims, T&& term) {
  return tensor_sum_impl(dims, term, false);
}

inline constexpr std::int64_t kMaxProductNodes = 400'000'000;

void check_product_cost(const std::vector<int>& dims);

// f receives a pointer to k complex arguments.
template <class F>
cplx product_value(F&& f, const std::vector<NodeSet>& sets, bool parallel) {
  std::vector<int> dims;
  for (const auto& s : sets) dims.push_back(static_cast<int>(s.size()));
  check_product_cost(dims);
  const int k = static_cast<int>(sets.size());
  auto term = [&](const int* idx) {
    std::array<cplx, 16> z;
    cplx w = 1.0;
    for (int a = 0; a < k; ++a) {
      const Node& nd = sets[a][idx[a]];
      z[a] = nd.z;
      w *= nd.w;
    }
    return f(z.data()) * w;
  };
  cplx s = tensor_sum_impl(dims, term, parallel);
  return s / std::pow(two_pi_i, k);
}

// k-fold (1/2 pi i)^k integral. The error estimate compares against the
// same rule with half the nodes per piece.
template <class F>
MomentResult integrate_product(F&& f, const std::vector<Contour>& contours, const QuadratureRule& rule,
                               bool parallel = true) {
  if (contours.size() > 4) throw GuardError("integrate_product supports at most 4 variables");
  std::vector<NodeSet> full, half;
  QuadratureRule hr = rule;
  hr.nodes_per_piece = std::max(8, rule.nodes_per_piece / 2);
  for (const auto& c : contours) {
    full.push_back(discretize(c, rule));
    half.push_back(discretize(c, hr));
  }
  MomentResult res;
  res.method = Method::product;
  res.value = product_value(f, full, parallel);
  res.err_estimate = std::abs(res.value - product_value(f, half, parallel));
  for (const auto& s : full) res.node_counts.push_back(static_cast<int>(s.size()));
  return res;
}

template <class F>
MomentResult integrate_product_serial(F&& f, const std::vector<Contour>& contours, const QuadratureRule& rule) {
  return integrate_product(f, contours, rule, false);
}

// Two-piece contours (circle around -tau plus circle around 0) for the nested
// moment formula, ordered a = 1..k.
std::vector<Contour> nested_contours(int k, const ModelParams& mp);

struct NestingReport {
  bool ok = true;
  double min_margin = 0.0;
  std::string detail;
};

NestingReport check_nesting(const std::vector<Contour>& cs, double tau);

// Contour families used by the moment formulas.
Contour c_one_rho(const ModelParams& mp, double rho = 0.0);
double c_one_rho_default(double tau);
Contour gamma_m1_0(const ModelParams& mp, double radius = 0.0, double cluster = 0.0);
Contour gamma_mtau_0(const ModelParams& mp, double radius = 0.0, double cluster = 0.0);
Contour d_theta_m(double theta, double M, double tail_length);
Contour gamma_bar(double x1, double r1, double x2, double r2);
Contour mb_line(double delta, double T);
Contour airy_wedge_in(cplx vertex, double length = 8.0);
Contour airy_wedge_out(cplx vertex, double length = 8.0);

// Smallest distance from any contour node to a point.
double min_distance(const Contour& c, cplx point, const QuadratureRule& rule = {});

}  // namespace asep
