#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "asep/exact.hpp"

namespace asep {

LaplaceResult tau_laplace_series(cplx zeta, int x, double t, int m_max, const EvalParams& ev, int k_cap) {
  if (!(std::abs(zeta) < 1.0)) throw DomainError("tau_laplace_series needs |zeta| < 1");
  if (m_max < 8) throw DomainError("tau_laplace_series needs m_max >= 8");
  if (k_cap < 1 || k_cap > 4) throw DomainError("k_cap must lie in 1..4");
  LaplaceResult res;
  res.value = 1.0;
  res.per_k.push_back(1.0);
  if (zeta == 0.0) return res;
  // Coarser grids for the small high-k terms.
  const int k_nodes[5] = {0, 0, 0, 96, 40};
  const double az = std::abs(zeta);
  double last_k_mag = 0.0, prev_k_mag = 0.0;
  for (int k = 1; k <= k_cap; ++k) {
    EvalParams e = ev;
    if (ev.nodes == 0 && k_nodes[k] > 0) e.nodes = k_nodes[k];
    cplx sk = 0.0;
    double tail = 0.0;
    int small = 0;
    cplx last = 0.0;
    for (int m = k; m <= m_max; ++m) {
      double err = 0.0;
      cplx term = std::pow(zeta, m) * halfflat_nu(k, m, x, t, e, &err);
      sk += term;
      res.err_estimate += std::pow(az, m) * err;
      last = term;
      // High-k terms are only needed to the accuracy of the k-truncation.
      if (std::abs(term) < (k <= 2 ? 1e-14 : 1e-9)) {
        if (++small == (k <= 2 ? 2 : 1)) break;
      } else {
        small = 0;
      }
    }
    // Geometric tail of the remaining m.
    tail = std::abs(last) * az / (1.0 - az);
    res.tail_estimate += tail;
    res.per_k.push_back(sk);
    res.value += sk;
    prev_k_mag = last_k_mag;
    last_k_mag = std::abs(sk);
  }
  // Remaining k beyond the cap, from the decay of the last two k-terms.
  if (k_cap >= 2 && prev_k_mag > 0.0) {
    double ratio = last_k_mag / prev_k_mag;
    if (ratio < 1.0) res.tail_estimate += last_k_mag * ratio / (1.0 - ratio);
    else res.truncation_warning = true;
  }
  res.note = fmt::format("k <= {}, m <= {}", k_cap, m_max);
  return res;
}

cplx mb_geometric(cplx zeta, double delta, double T, double h) {
  if (zeta.imag() == 0.0 && zeta.real() >= 0.0) throw DomainError("zeta must avoid [0, inf)");
  cplx lz = std::log(-zeta);
  int S = static_cast<int>(std::floor(2.0 * T / h + 0.5));
  cplx sum = 0.0;
  for (int j = 0; j <= S; ++j) {
    cplx s(delta, -T + j * h);
    sum += pi / std::sin(-pi * s) * std::exp(s * lz);
  }
  // ds = i dy, divided by 2 pi i.
  return sum * h / (2.0 * pi);
}

namespace {

struct MbGrid {
  std::vector<cplx> s;     // lattice on Re s = delta
  std::vector<cplx> w;     // circle nodes
  std::vector<cplx> ws;    // circle weights / (2 pi i)
  std::vector<cplx> tsp;   // tau^s
  std::vector<cplx> A;     // [j * N + i]: single factor with both weights
};

MbGrid make_grid(cplx zeta, int x, double t, const ModelParams& mp, const QTruncation& tr, double delta, double R,
                 double T, double h, int N, int stride_s, int stride_w) {
  MbGrid g;
  cplx lz = std::log(-zeta);
  int S = static_cast<int>(std::floor(2.0 * T / h + 0.5));
  for (int j = 0; j <= S; j += stride_s) g.s.push_back(cplx(delta, -T + j * h));
  for (int i = 0; i < N; i += stride_w) {
    cplx w = std::polar(R, 2.0 * pi * i / N);
    g.w.push_back(w);
    g.ws.push_back(w * (static_cast<double>(stride_w) / N));  // i w dtheta / (2 pi i)
  }
  const double hs = h * stride_s / (2.0 * pi);  // i dy / (2 pi i)
  const int n = static_cast<int>(g.w.size());
  for (cplx s : g.s) g.tsp.push_back(tau_pow(mp.tau, s));
  g.A.resize(g.s.size() * n);
  for (std::size_t j = 0; j < g.s.size(); ++j) {
    cplx s = g.s[j];
    cplx pre = hs * pi / std::sin(-pi * s) * std::exp(s * lz);
    for (int i = 0; i < n; ++i)
      g.A[j * n + i] = pre * g.ws[i] * germ_f(g.w[i], s, x + 1, t, mp) * germ_g(g.w[i], s, mp, tr);
  }
  return g;
}

cplx mb_k1(const MbGrid& g) {
  const int n = static_cast<int>(g.w.size());
  cplx sum = 0.0;
  for (std::size_t j = 0; j < g.s.size(); ++j)
    for (int i = 0; i < n; ++i) sum += g.A[j * n + i] * (-1.0 / (g.w[i] * (g.tsp[j] - 1.0)));
  return sum;
}

// Uses the symmetry (s1, w1) <-> (s2, w2) of the k = 2 integrand.
cplx mb_k2(const MbGrid& g, const ModelParams& mp, const QTruncation& tr, bool parallel) {
  const int n = static_cast<int>(g.w.size());
  const int S = static_cast<int>(g.s.size());
  const double tau = mp.tau;
  // w_{i1} w_{i2} depends on (i1 + i2) mod n; s1 + s2 on j1 + j2.
  std::vector<cplx> ww(n), p0(n), p1(static_cast<std::size_t>(S) * n), p2(static_cast<std::size_t>(2 * S - 1) * n);
  for (int m = 0; m < n; ++m) {
    ww[m] = g.w[0] * g.w[m];
    p0[m] = poch_inf(ww[m], tau, tr);
  }
  for (int j = 0; j < S; ++j)
    for (int m = 0; m < n; ++m) p1[j * n + m] = 1.0 / poch_inf(g.tsp[j] * ww[m], tau, tr);
  for (int jj = 0; jj < 2 * S - 1; ++jj) {
    double step = S > 1 ? g.s[1].imag() - g.s[0].imag() : 0.0;
    cplx ts = tau_pow(tau, cplx(2.0 * g.s[0].real(), 2.0 * g.s[0].imag() + jj * step));
    for (int m = 0; m < n; ++m) p2[jj * n + m] = poch_inf(ts * ww[m], tau, tr);
  }
  std::vector<cplx> diag(static_cast<std::size_t>(S) * n);
  for (int j = 0; j < S; ++j)
    for (int i = 0; i < n; ++i) diag[j * n + i] = -1.0 / (g.w[i] * (g.tsp[j] - 1.0));
  const std::int64_t U = static_cast<std::int64_t>(S) * n;
  std::vector<cplx> off(static_cast<std::size_t>(S) * n * n);
  for (int j = 0; j < S; ++j)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) off[(static_cast<std::size_t>(j) * n + i1) * n + i2] = -1.0 / (g.w[i1] * g.tsp[j] - g.w[i2]);
  auto term = [&](const int* idx) {
    const std::int64_t u1 = idx[0];
    const int j1 = static_cast<int>(u1 / n), i1 = static_cast<int>(u1 % n);
    const cplx a1 = g.A[u1];
    const cplx d1 = diag[u1];
    cplx acc = 0.0;
    for (std::int64_t u2 = u1; u2 < U; ++u2) {
      const int j2 = static_cast<int>(u2 / n), i2 = static_cast<int>(u2 % n);
      const int m = (i1 + i2) % n;
      cplx det = d1 * diag[u2] - off[(static_cast<std::size_t>(j1) * n + i1) * n + i2] *
                                     off[(static_cast<std::size_t>(j2) * n + i2) * n + i1];
      cplx hh = p0[m] * p2[(j1 + j2) * n + m] * p1[j1 * n + m] * p1[j2 * n + m];
      cplx v = g.A[u2] * det * hh;
      acc += u2 == u1 ? v : 2.0 * v;
    }
    return a1 * acc;
  };
  std::vector<int> dims{static_cast<int>(U)};
  cplx s = tensor_sum_impl(dims, term, parallel);
  return s / 2.0;
}

}  // namespace

LaplaceResult tau_laplace_mb(cplx zeta, int x, double t, int k_max, const EvalParams& ev, const MbOptions& opt) {
  if (zeta.imag() == 0.0 && zeta.real() >= 0.0) throw DomainError("tau_laplace_mb needs zeta outside [0, inf)");
  if (k_max < 0 || k_max > 2) throw GuardError("tau_laplace_mb supports k_max <= 2");
  const ModelParams& mp = ev.params;
  const double tau = mp.tau;
  if (!(opt.delta > 0.0 && opt.delta < 1.0)) throw DomainError("Mellin-Barnes line must satisfy 0 < Re s < 1");
  double hi = std::pow(tau, -opt.delta / 2.0);
  double R = opt.radius > 0.0 ? opt.radius : std::pow(tau, -opt.delta / 4.0);
  if (!(R > 1.0 && R < hi)) throw DomainError(fmt::format("w-circle radius {} outside (1, {})", R, hi));
  if (opt.nodes < 16 || opt.nodes % 2) throw DomainError("MB circle nodes must be even and >= 16");
  int S = static_cast<int>(std::floor(2.0 * opt.T / opt.h + 0.5));
  if (S % 2) throw DomainError("MB lattice needs an even number of steps (2T/h)");
  LaplaceResult res;
  res.value = 1.0;
  res.per_k.push_back(1.0);
  if (k_max == 0) return res;
  // Line truncation: the integrand decays like exp(-pi |Im s| + |arg(-zeta)| |Im s|).
  double decay = pi - std::abs(std::arg(-zeta));
  double line_tail = 2.0 * std::exp(-decay * opt.T) / std::max(decay, 1e-12);
  if (line_tail > 1e-9) res.truncation_warning = true;
  {
    const int n1 = 4 * opt.nodes;
    MbGrid g = make_grid(zeta, x, t, mp, ev.trunc, opt.delta, R, opt.T, opt.h, n1, 1, 1);
    MbGrid gh = make_grid(zeta, x, t, mp, ev.trunc, opt.delta, R, opt.T, opt.h, n1, 2, 2);
    cplx v = mb_k1(g);
    res.per_k.push_back(v);
    res.value += v;
    res.err_estimate += std::abs(v - mb_k1(gh));
  }
  if (k_max >= 2) {
    MbGrid g = make_grid(zeta, x, t, mp, ev.trunc, opt.delta, R, opt.T, opt.h, opt.nodes, 1, 1);
    MbGrid gh = make_grid(zeta, x, t, mp, ev.trunc, opt.delta, R, opt.T, opt.h, opt.nodes, 2, 2);
    cplx v = mb_k2(g, mp, ev.trunc, ev.parallel);
    res.per_k.push_back(v);
    res.value += v;
    res.err_estimate += std::abs(v - mb_k2(gh, mp, ev.trunc, ev.parallel));
  }
  double last = std::abs(res.per_k.back());
  double prev = std::abs(res.per_k[res.per_k.size() - 2]);
  double ratio = prev > 0.0 ? last / prev : 1.0;
  res.tail_estimate = ratio < 1.0 ? last * ratio / (1.0 - ratio) : INFINITY;
  res.note = fmt::format("line Re s = {}, |Im s| <= {}, h = {}, radius {:.4f}", opt.delta, opt.T, opt.h, R);
  return res;
}

}  // namespace asep
