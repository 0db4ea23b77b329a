#include "asep/bose.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "asep/exact.hpp"
#include "tabulated.hpp"

namespace asep {

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

cplx lanczos_log(cplx z) {
  z -= 1.0;
  cplx a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  cplx tt = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(tt) - tt + std::log(a);
}

bool at_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

// Distance from z to the nearest nonpositive integer.
double pole_distance(cplx z) {
  double r = std::min(0.0, std::round(z.real()));
  return std::abs(z - r);
}

}  // namespace

cplx log_gamma(cplx z) {
  if (at_pole(z)) throw PoleError(fmt::format("Gamma pole at {}", z.real()));
  if (z.real() >= 0.5) return lanczos_log(z);
  return std::log(pi) - std::log(std::sin(pi * z)) - lanczos_log(1.0 - z);
}

cplx gamma_fn(cplx z) {
  if (at_pole(z)) throw PoleError(fmt::format("Gamma pole at {}", z.real()));
  if (z.real() >= 0.5) return std::exp(lanczos_log(z));
  return pi / (std::sin(pi * z) * std::exp(lanczos_log(1.0 - z)));
}

cplx rgamma(cplx z) {
  if (at_pole(z)) return 0.0;
  if (z.real() >= 0.5) return std::exp(-lanczos_log(z));
  return std::sin(pi * z) * std::exp(lanczos_log(1.0 - z)) / pi;
}

QuadratureRule bose_rule() {
  QuadratureRule r;
  r.nodes_per_piece = 16;
  r.panel_length = 1.0;
  return r;
}

double bose_line_half_length(double t, double theta, double tail_cut) {
  return std::sqrt(2.0 * std::log(1.0 / tail_cut) / t) + std::abs(theta) + 4.0;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double heat_kernel(double t, double x) { return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * pi * t); }

namespace {

void check_time(double t) {
  if (!(t > 0.0)) throw DomainError("bose formulas need t > 0");
}

void check_increasing(const std::vector<double>& xs) {
  if (xs.empty() || xs.size() > 3) throw DomainError("bose formulas support 1 <= k <= 3");
  for (std::size_t a = 1; a < xs.size(); ++a)
    if (!(xs[a - 1] < xs[a])) throw DomainError("bose formulas need x_1 < ... < x_k");
}

std::vector<double> ladder(int k, double shift, const std::vector<double>& given) {
  std::vector<double> al = given;
  if (al.empty())
    for (int a = 0; a < k; ++a) al.push_back(shift + 0.5 + 1.5 * (k - 1 - a));
  if (static_cast<int>(al.size()) != k) throw DomainError("alpha ladder must have k entries");
  // alpha_1 > alpha_2 + 1 > ... > alpha_k + k - 1 > k - 1, with margin.
  const double margin = 1e-6;
  for (int a = 0; a + 1 < k; ++a)
    if (!(al[a] > al[a + 1] + 1.0 + margin)) throw DomainError("alpha ladder violates alpha_a > alpha_{a+1} + 1");
  if (!(al[k - 1] > margin)) throw DomainError("alpha ladder needs alpha_k > 0");
  return al;
}

NodeSet line_nodes(double re, double half, const QuadratureRule& rule) {
  return discretize(Piece{Segment{cplx(re, -half), cplx(re, half)}}, rule);
}

QuadratureRule halved(const QuadratureRule& rule) {
  QuadratureRule h = rule;
  h.panel_length = 2.0 * rule.panel_length;
  h.nodes_per_piece = std::max(16, rule.nodes_per_piece / 2);
  return h;
}

// Product integral over vertical lines: singles sa(a, z), pairs pb(a, b, za, zb).
template <class Single, class Pair>
cplx line_product(const std::vector<NodeSet>& sets, Single&& sa, Pair&& pb, bool parallel) {
  const int k = static_cast<int>(sets.size());
  detail::Tabulated T(k);
  for (int a = 0; a < k; ++a) {
    const NodeSet& ns = sets[a];
    T.dims[a] = static_cast<int>(ns.size());
    T.single[a].resize(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) T.single[a][i] = sa(a, ns[i].z) * ns[i].w / two_pi_i;
  }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      auto& tab = T.pair[a * k + b];
      tab.resize(sets[a].size() * sets[b].size());
      for (std::size_t i = 0; i < sets[a].size(); ++i)
        for (std::size_t j = 0; j < sets[b].size(); ++j) tab[i * sets[b].size() + j] = pb(a, b, sets[a][i].z, sets[b][j].z);
    }
  return detail::tabulated_sum(T, 1, parallel);
}

template <class Single, class Pair>
MomentResult ladder_integral(const std::vector<double>& al, double half, const QuadratureRule& rule, Single&& sa,
                             Pair&& pb) {
  const int k = static_cast<int>(al.size());
  std::vector<NodeSet> full, coarse;
  QuadratureRule hr = halved(rule);
  for (int a = 0; a < k; ++a) {
    full.push_back(line_nodes(al[a], half, rule));
    coarse.push_back(line_nodes(al[a], half, hr));
  }
  MomentResult res;
  res.method = Method::bose;
  res.value = line_product(full, sa, pb, true);
  res.err_estimate = std::abs(res.value - line_product(coarse, sa, pb, true));
  for (const auto& s : full) res.node_counts.push_back(static_cast<int>(s.size()));
  return res;
}

}  // namespace

MomentResult delta_bose_moment(const std::vector<double>& xs, double t, const BoseParams& bp,
                               const QuadratureRule& rule) {
  check_increasing(xs);
  check_time(t);
  if (!(bp.theta >= 0.0)) throw DomainError("theta must be >= 0");
  const int k = static_cast<int>(xs.size());
  const double th = bp.theta;
  std::vector<double> al = ladder(k, th, bp.alpha_ladder);
  double half = bose_line_half_length(t, th, rule.tail_cut);
  auto sa = [&](int a, cplx z) { return std::exp(0.5 * t * (z - th) * (z - th) + (z - th) * xs[a]) / z; };
  auto pb = [](int, int, cplx za, cplx zb) { return (za - zb) / (za - zb - 1.0) * (za + zb - 1.0) / (za + zb); };
  MomentResult res = ladder_integral(al, half, rule, sa, pb);
  res.note = fmt::format("theta = {}, |Im z| <= {:.3f}", th, half);
  return res;
}

MomentResult narrow_wedge_moment(const std::vector<double>& xs, double t, const QuadratureRule& rule,
                                 const std::vector<double>& alpha_ladder) {
  check_increasing(xs);
  check_time(t);
  const int k = static_cast<int>(xs.size());
  std::vector<double> al = ladder(k, 0.0, alpha_ladder);
  double half = bose_line_half_length(t, 0.0, rule.tail_cut);
  auto sa = [&](int a, cplx z) { return std::exp(0.5 * t * z * z + z * xs[a]); };
  auto pb = [](int, int, cplx za, cplx zb) { return (za - zb) / (za - zb - 1.0); };
  MomentResult res = ladder_integral(al, half, rule, sa, pb);
  res.note = fmt::format("narrow wedge, |Im z| <= {:.3f}", half);
  return res;
}

namespace {

struct CollapsedPart {
  cplx value;
  double err = 0.0;
  double min_pole_distance = INFINITY;
};

CollapsedPart collapsed_impl(const std::vector<int>& n, double x, double t, const BoseParams& bp,
                             const QuadratureRule& rule) {
  const int l = static_cast<int>(n.size());
  const double th = bp.theta;
  // The common line moves right by theta; no singularity lies to the right.
  const double re = bp.alpha + th;
  double half = bose_line_half_length(t, th, rule.tail_cut);
  CollapsedPart out;
  auto build = [&](const QuadratureRule& r) {
    NodeSet ns = line_nodes(re, half, r);
    const int N = static_cast<int>(ns.size());
    detail::Tabulated T(l);
    for (int a = 0; a < l; ++a) {
      const double na = n[a];
      T.dims[a] = N;
      T.single[a].resize(N);
      for (int i = 0; i < N; ++i) {
        cplx w = ns[i].z;
        out.min_pole_distance = std::min(out.min_pole_distance, pole_distance(2.0 * w));
        cplx e = std::exp(t * (na * na * na / 24.0 - na / 24.0 + 0.5 * na * (w - th) * (w - th)) + x * na * (w - th));
        T.single[a][i] = e * gamma_fn(2.0 * w) * rgamma(2.0 * w + na) * ns[i].w / two_pi_i;
      }
      T.det[a * l + a].assign(N, 1.0 / na);
    }
    for (int a = 0; a < l; ++a)
      for (int b = 0; b < l; ++b) {
        if (a == b) continue;
        const double m = 0.5 * (n[a] + n[b]);
        auto& dt = T.det[a * l + b];
        dt.resize(static_cast<std::size_t>(N) * N);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) dt[static_cast<std::size_t>(i) * N + j] = 1.0 / (ns[i].z - ns[j].z + m);
        if (a > b) continue;
        const double d = 0.5 * (n[a] - n[b]);
        auto& pt = T.pair[a * l + b];
        pt.resize(static_cast<std::size_t>(N) * N);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) {
            cplx s = ns[i].z + ns[j].z;
            out.min_pole_distance = std::min({out.min_pole_distance, pole_distance(s + d), pole_distance(s - d)});
            pt[static_cast<std::size_t>(i) * N + j] =
                gamma_fn(s + d) * gamma_fn(s - d) * rgamma(s - m) * rgamma(s + m);
          }
      }
    T.has_det = true;
    return detail::tabulated_sum(T, 1, true);
  };
  out.value = build(rule);
  out.err = std::abs(out.value - build(halved(rule)));
  return out;
}

}  // namespace

cplx collapsed_term(const std::vector<int>& parts, double x, double t, const BoseParams& bp,
                    const QuadratureRule& rule) {
  check_time(t);
  if (parts.empty() || parts.size() > 3) throw DomainError("collapsed_term needs 1..3 parts");
  return collapsed_impl(parts, x, t, bp, rule).value;
}

MomentResult she_halfflat_moment_collapsed(int k, double x, double t, const BoseParams& bp,
                                           const QuadratureRule& rule) {
  if (k < 1 || k > 3) throw DomainError("collapsed formula supports 1 <= k <= 3");
  check_time(t);
  if (!(bp.alpha > 0.0)) throw DomainError("collapsed formula needs alpha > 0");
  if (!(bp.theta >= 0.0)) throw DomainError("theta must be >= 0");
  MomentResult res;
  res.method = Method::bose;
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  const double pre = std::pow(2.0, k) * kfact;
  double min_pd = INFINITY;
  for (int l = 1; l <= k; ++l) {
    double lfact = 1.0;
    for (int i = 2; i <= l; ++i) lfact *= i;
    for (const Composition& c : compositions(k, l)) {
      CollapsedPart p = collapsed_impl(c.parts, x, t, bp, rule);
      res.value += pre / lfact * p.value;
      res.err_estimate += pre / lfact * p.err;
      min_pd = std::min(min_pd, p.min_pole_distance);
    }
  }
  if (min_pd < 1e-6) {
    res.truncation_warning = true;
    res.note = fmt::format("Gamma argument within {:.2e} of a pole", min_pd);
  } else {
    res.note = fmt::format("alpha = {}, theta = {}", bp.alpha, bp.theta);
  }
  return res;
}

WeylReport weyl_linearity_check(int k, double x, double t, double theta, const QuadratureRule& rule, int outer_nodes) {
  if (k < 1 || k > 2) throw DomainError("weyl_linearity_check supports k in {1, 2}");
  check_time(t);
  if (!(theta >= 0.0)) throw DomainError("theta must be >= 0");
  WeylReport rep;
  rep.lower = std::min(x, 0.0) - std::sqrt(2.0 * t * std::log(1e10)) - 2.0;
  const double span = x - rep.lower;
  const GaussRule& g = gauss_legendre(outer_nodes);
  std::vector<double> al = ladder(k, 0.0, {});
  double half = bose_line_half_length(t, 0.0, rule.tail_cut);
  std::vector<NodeSet> lines;
  for (int a = 0; a < k; ++a) lines.push_back(line_nodes(al[a], half, rule));
  // Narrow-wedge line weights c_i = e^{t z^2 / 2} dz / (2 pi i).
  std::vector<std::vector<cplx>> c(k);
  for (int a = 0; a < k; ++a)
    for (const Node& nd : lines[a]) c[a].push_back(std::exp(0.5 * t * nd.z * nd.z) * nd.w / two_pi_i);
  auto map = [&](double lo, double hi, int q, double& y, double& w) {
    y = lo + 0.5 * (hi - lo) * (g.x[q] + 1.0);
    w = 0.5 * (hi - lo) * g.w[q];
  };
  cplx total = 0.0;
  double edge = 0.0;
  if (k == 1) {
    for (int p = 0; p < outer_nodes; ++p) {
      double y, w;
      map(rep.lower, x, p, y, w);
      cplx v = 0.0;
      for (std::size_t i = 0; i < lines[0].size(); ++i) v += c[0][i] * std::exp(lines[0][i].z * y);
      cplx f = v * std::exp(-theta * (x - y));
      total += w * f;
      if (p == 0) edge = std::abs(f);
    }
  } else {
    const NodeSet& L1 = lines[0];
    const NodeSet& L2 = lines[1];
    const std::size_t n1 = L1.size(), n2 = L2.size();
    std::vector<cplx> P(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) {
        cplx d = L1[i].z - L2[j].z;
        P[i * n2 + j] = c[0][i] * d / (d - 1.0);
      }
    std::vector<cplx> parts(outer_nodes);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < outer_nodes; ++p) {
      double y2, w2;
      map(rep.lower, x, p, y2, w2);
      // G(i) = sum_q w_q e^{-theta (x - y1_q)} e^{z1_i y1_q} over y1 in [lower, y2].
      std::vector<cplx> G(n1, 0.0);
      for (int q = 0; q < outer_nodes; ++q) {
        double y1, w1;
        map(rep.lower, y2, q, y1, w1);
        double e = w1 * std::exp(-theta * (x - y1));
        for (std::size_t i = 0; i < n1; ++i) G[i] += e * std::exp(L1[i].z * y1);
      }
      cplx s = 0.0;
      for (std::size_t j = 0; j < n2; ++j) {
        cplx h = 0.0;
        for (std::size_t i = 0; i < n1; ++i) h += G[i] * P[i * n2 + j];
        s += c[1][j] * std::exp(L2[j].z * y2) * h;
      }
      parts[p] = w2 * std::exp(-theta * (x - y2)) * s;
    }
    for (cplx v : parts) total += v;
    total *= 2.0;
    // Integrand size near the cut, on the diagonal.
    double y = rep.lower;
    cplx v = 0.0;
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) v += P[i * n2 + j] * c[1][j] * std::exp((L1[i].z + L2[j].z) * y);
    edge = std::abs(v) * std::exp(-2.0 * theta * (x - y));
  }
  rep.weyl = total;
  if (edge * span > 1e-8) rep.truncation_warning = true;
  BoseParams bp;
  bp.theta = theta;
  rep.collapsed = she_halfflat_moment_collapsed(k, x, t, bp, rule).value;
  rep.gap = std::abs(rep.weyl - rep.collapsed);
  return rep;
}

}  // namespace asep
