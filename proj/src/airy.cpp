#include "asep/airy.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "asep/quad.hpp"

namespace asep {

namespace {

const double kCbrt2 = std::cbrt(2.0);

QuadratureRule ray_rule(int nodes, double length) {
  QuadratureRule r;
  r.nodes_per_piece = nodes;
  r.panel_length = length;
  return r;
}

template <class F>
cplx airy_wedge(cplx z, int nodes, F&& factor) {
  if (nodes < 32) throw DomainError("airy wedge needs >= 32 nodes per ray");
  double v = std::sqrt(std::max(z.real(), 0.0));
  NodeSet ns = discretize(airy_wedge_in(cplx(v, 0.0), 8.0), ray_rule(nodes, 8.0));
  cplx s = 0.0;
  for (const Node& nd : ns) s += factor(nd.z) * std::exp(nd.z * nd.z * nd.z / 3.0 - z * nd.z) * nd.w;
  return s / two_pi_i;
}

void check_spec(const KernelSpec& s) {
  if (!(s.ray_length >= 6.0)) throw DomainError("ray_length must be >= 6");
  if (s.nodes_per_ray < 32) throw DomainError("nodes_per_ray must be >= 32");
}

// Contour data for one x. In the variables w = u + a, omega = v + a the
// exponents are w^3/3 - w Lambda and -(omega^3/3 - omega Lambda') with
// Lambda = lambda - c + a^2. For a >= 1/4 the omega vertex sits left of the
// reflected pole omega = 2a - w, which leaves a residue sigma B(lambda, lambda').
struct Setup {
  double a = 0.0, c = 0.0;
  double sigma = 1.0;
  bool residue = false;
  NodeSet wn, on;
  std::vector<int> wend, oend;  // nodes at the ray ends
};

std::vector<int> far_nodes(const NodeSet& ns, cplx vertex) {
  double best = 0.0;
  for (const Node& nd : ns) best = std::max(best, std::abs(nd.z - vertex));
  std::vector<int> idx;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (std::abs(ns[i].z - vertex) > best - 1e-9) idx.push_back(static_cast<int>(i));
  return idx;
}

Setup make_setup(const KernelSpec& spec) {
  check_spec(spec);
  Setup st;
  st.a = spec.x / kCbrt2;
  st.c = spec.x <= 0.0 ? st.a * st.a : 0.0;
  st.sigma = spec.printed_sign ? -1.0 : 1.0;
  double ku = 1.0, kv = 0.0;
  if (st.a >= 0.25) {
    ku = std::max(st.a, 0.5);
    kv = -ku;
    st.residue = true;
  }
  QuadratureRule r = ray_rule(spec.nodes_per_ray, spec.ray_length);
  st.wn = discretize(airy_wedge_in(cplx(ku, 0.0), spec.ray_length), r);
  st.on = discretize(airy_wedge_out(cplx(kv, 0.0), spec.ray_length), r);
  st.wend = far_nodes(st.wn, ku);
  st.oend = far_nodes(st.on, kv);
  return st;
}

// gauged = true adds e^{a (lambda - c)} on the left and its inverse on the
// right, i.e. the printed kernel.
std::vector<cplx> fill(const Setup& st, const std::vector<double>& pts, bool gauged, bool* truncated) {
  using Mat = Eigen::MatrixXcd;
  const int n = static_cast<int>(pts.size());
  const int nu = static_cast<int>(st.wn.size()), nv = static_cast<int>(st.on.size());
  const double a = st.a;
  Mat A(n, nu), B(nv, n), M(nu, nv);
  bool trunc = false;
  for (int p = 0; p < n; ++p) {
    double lam = pts[p] - st.c + a * a;
    double g = gauged ? a * (pts[p] - st.c) : 0.0;
    double amax = 0.0, bmax = 0.0;
    for (int i = 0; i < nu; ++i) {
      cplx w = st.wn[i].z;
      A(p, i) = std::exp(w * w * w / 3.0 - w * lam + g);
      amax = std::max(amax, std::abs(A(p, i)));
    }
    for (int j = 0; j < nv; ++j) {
      cplx o = st.on[j].z;
      B(j, p) = std::exp(-o * o * o / 3.0 + o * lam - g);
      bmax = std::max(bmax, std::abs(B(j, p)));
    }
    double aend = 0.0, bend = 0.0;
    for (int i : st.wend) aend = std::max(aend, std::abs(A(p, i)));
    for (int j : st.oend) bend = std::max(bend, std::abs(B(j, p)));
    if (aend > 1e-18 * amax || bend > 1e-18 * bmax) trunc = true;
  }
  const cplx norm = 1.0 / (two_pi_i * two_pi_i);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      cplx w = st.wn[i].z, o = st.on[j].z;
      M(i, j) = norm * st.wn[i].w * st.on[j].w * (1.0 / (w - o) + st.sigma / (w + o - 2.0 * a));
    }
  Mat MB = M * B;
  Mat K(n, n);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < n; ++p) K.row(p) = A.row(p) * MB;
  if (st.residue) {
    // In the printed gauge the residue is gauge free; otherwise it carries e^{-a (lambda - lambda')}.
#pragma omp parallel for schedule(static)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        cplx r = airy_ai((pts[p] + pts[q]) / kCbrt2) / kCbrt2;
        if (!gauged) r *= std::exp(-a * (pts[p] - pts[q]));
        K(p, q) += st.sigma * r;
      }
  }
  if (truncated) *truncated = trunc;
  std::vector<cplx> out(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) out[static_cast<std::size_t>(p) * n + q] = K(p, q);
  return out;
}

std::vector<double> grid_nodes(const NystromGrid& g, std::vector<double>& w) {
  const GaussRule& gl = gauss_legendre(g.n);
  std::vector<double> x(g.n);
  w.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    x[i] = g.lower + 0.5 * g.span * (gl.x[i] + 1.0);
    w[i] = 0.5 * g.span * gl.w[i];
  }
  return x;
}

}  // namespace

cplx airy_ai(cplx z, int nodes_per_ray) {
  return airy_wedge(z, nodes_per_ray, [](cplx) { return cplx(1.0); });
}

cplx airy_ai_prime(cplx z, int nodes_per_ray) {
  return airy_wedge(z, nodes_per_ray, [](cplx t) { return -t; });
}

cplx k2to1(double lambda, double lambda_prime, const KernelSpec& spec) {
  Setup st = make_setup(spec);
  std::vector<double> pts{lambda, lambda_prime};
  return fill(st, pts, true, nullptr)[1];
}

std::vector<cplx> k2to1_matrix(const std::vector<double>& pts, const KernelSpec& spec, bool* truncated) {
  Setup st = make_setup(spec);
  // For x <= 0 the gauge-free kernel is O(1); for x > 0 the printed gauge is.
  return fill(st, pts, spec.x > 0.0, truncated);
}

double fredholm_det(const KernelFill& kernel, const NystromGrid& grid) {
  if (grid.n < 24) throw DomainError("Nystrom grid needs n >= 24");
  if (!(grid.span >= 8.0)) throw DomainError("Nystrom grid needs span >= 8");
  std::vector<double> w;
  std::vector<double> x = grid_nodes(grid, w);
  std::vector<cplx> K = kernel(x);
  const int n = grid.n;
  Eigen::MatrixXcd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      M(i, j) = (i == j ? 1.0 : 0.0) - std::sqrt(w[i]) * K[static_cast<std::size_t>(i) * n + j] * std::sqrt(w[j]);
  cplx d = M.partialPivLu().determinant();
  if (!(std::abs(d.imag()) < 1e-8))
    throw ConsistencyError(fmt::format("Fredholm determinant has imaginary part {:.3e}", d.imag()));
  return d.real();
}

AiryOracles airy_oracles(double s) {
  if (!(s >= -10.0 && s <= 6.0)) throw DomainError("airy_oracles needs s in [-10, 6]");
  NystromGrid g;
  g.lower = s;
  g.span = std::max(10.0, 12.0 - s);
  g.n = std::max(40, static_cast<int>(std::ceil(3.0 * g.span)));
  auto kai = [](const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> ai(n), aip(n);
    for (std::size_t i = 0; i < n; ++i) {
      ai[i] = airy_ai(x[i]).real();
      aip[i] = airy_ai_prime(x[i]).real();
    }
    std::vector<cplx> K(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        K[i * n + j] = i == j ? aip[i] * aip[i] - x[i] * ai[i] * ai[i]
                              : (ai[i] * aip[j] - aip[i] * ai[j]) / (x[i] - x[j]);
    return K;
  };
  auto bker = [](const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> K(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) K[i * n + j] = K[j * n + i] = airy_ai(x[i] + x[j]).real();
    return K;
  };
  AiryOracles o;
  o.f_airy2 = fredholm_det(kai, g);
  o.f_airy1 = fredholm_det(bker, g);
  return o;
}

double halfflat_limit_cdf(double x, double r, const KernelSpec& spec, const NystromGrid& grid) {
  KernelSpec ks = spec;
  ks.x = x;
  NystromGrid g = grid;
  g.lower = kCbrt2 * r;
  return fredholm_det([&](const std::vector<double>& p) { return k2to1_matrix(p, ks); }, g);
}

}  // namespace asep
