#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "asep/exact.hpp"
#include "tabulated.hpp"

namespace asep {

using detail::Tabulated;

cplx eps(cplx xi, const ModelParams& mp) {
  if (xi == 0.0) throw PoleError("eps: xi = 0");
  return mp.p / xi + mp.q * xi - 1.0;
}

cplx eps_tilde(cplx z, const ModelParams& mp) {
  if (std::abs(1.0 - z) < 1e-300 || std::abs(1.0 - mp.tau * z) < 1e-300) throw PoleError("eps_tilde pole");
  return mp.p * (1.0 - z) / (1.0 - mp.tau * z) + mp.q * (1.0 - mp.tau * z) / (1.0 - z) - 1.0;
}

cplx eps_hat(cplx y, const ModelParams& mp) { return eps_tilde(-y / mp.tau, mp); }

namespace {

cplx ipow(cplx b, int e) {
  if (e < 0) return 1.0 / ipow(b, -e);
  cplx r = 1.0;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

}  // namespace

cplx f_xt(cplx z, int x, double t, const ModelParams& mp) {
  return ipow((1.0 - mp.tau * z) / (1.0 - z), x - 1) * std::exp(eps_tilde(z, mp) * t);
}

cplx big_f_xt(cplx y, int x, double t, const ModelParams& mp) {
  double tau = mp.tau;
  return (tau + y) / (tau - y * y) * ipow((1.0 + y) / (1.0 + y / tau), x - 1) * std::exp(t * eps_hat(y, mp));
}

namespace {

constexpr double kTargetDigits = 30.0;  // ln(1e13)
constexpr double kGridBudget = 4e8;

// Trapezoid node count for a circle whose integrand is analytic in an
// annulus of geometric width `rate`.
int auto_nodes(double rate, int k, const EvalParams& ev, std::string* note) {
  int n;
  if (ev.nodes > 0) {
    n = ev.nodes + (ev.nodes & 1);
  } else {
    n = static_cast<int>(std::ceil(kTargetDigits / std::log(rate))) + 16;
    n = (n + 7) / 8 * 8;
    n = std::clamp(n, 32, ev.max_nodes);
    int cap = static_cast<int>(std::floor(std::pow(kGridBudget, 1.0 / k)));
    cap -= cap & 1;
    if (n > cap) {
      if (note) *note += fmt::format("nodes capped at {} (wanted {}); ", cap, n);
      n = cap;
    }
  }
  return n;
}

QuadratureRule rule_with(const EvalParams& ev, int n) {
  QuadratureRule r = ev.rule;
  r.nodes_per_piece = n;
  return r;
}

MomentResult finish(const Tabulated& T, cplx prefactor, Method m, const EvalParams& ev) {
  MomentResult res;
  res.method = m;
  cplx full = tabulated_sum(T, 1, ev.parallel);
  cplx half = tabulated_sum(T, 2, ev.parallel);
  res.value = prefactor * full;
  res.err_estimate = std::abs(prefactor * (full - half));
  res.node_counts = T.dims;
  return res;
}

double qtilde_rate(double tau, double rho) {
  double d = std::min({1.0 / std::sqrt(tau) - 1.0, 1.0 - tau * (1.0 + rho), 1.0 / (tau * (1.0 + rho)) - 1.0,
                       (1.0 - rho) / tau - 1.0});
  return d / rho;
}

cplx qtilde_cross(cplx za, cplx zb, double tau) {
  return (za - zb) / (za - tau * zb) * (1.0 - za * zb) / (1.0 - tau * za * zb);
}

cplx nested_cross(cplx ya, cplx yb, double tau) {
  return (ya - yb) / (ya - tau * yb) * (1.0 - ya * yb / (tau * tau)) / (1.0 - ya * yb / tau);
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and nonnegative");
}

}  // namespace

MomentResult qtilde_integral(const std::vector<int>& xs, double t, const EvalParams& ev) {
  check_time(t);
  const int k = static_cast<int>(xs.size());
  if (k < 1 || k > 4) throw DomainError("qtilde needs 1 <= k <= 4");
  const ModelParams& mp = ev.params;
  const double tau = mp.tau;
  Contour c = c_one_rho(mp);
  double rho = std::get<Circle>(c.pieces[0]).radius;
  std::string note;
  int n = auto_nodes(qtilde_rate(tau, rho), k, ev, &note);
  NodeSet nodes = discretize(c, rule_with(ev, n));
  Tabulated T(k);
  for (int a = 0; a < k; ++a) {
    T.dims[a] = n;
    T.single[a].resize(n);
    for (int i = 0; i < n; ++i) {
      cplx z = nodes[i].z;
      T.single[a][i] = nodes[i].w / two_pi_i * f_xt(z, xs[a], t, mp) / (tau * z * z - 1.0);
    }
  }
  std::vector<cplx> cross(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cross[i * n + j] = i == j ? 0.0 : qtilde_cross(nodes[i].z, nodes[j].z, tau);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) T.pair[a * k + b] = cross;
  MomentResult r = finish(T, std::pow(tau, 0.5 * k * (k - 1)), Method::qtilde, ev);
  r.note = note;
  return r;
}

MomentResult qtilde_moments(const std::vector<int>& xs, double t, const EvalParams& ev) {
  for (std::size_t a = 1; a < xs.size(); ++a)
    if (xs[a] <= xs[a - 1]) throw DomainError("qtilde_moments needs strictly increasing sites");
  return qtilde_integral(xs, t, ev);
}

double qtilde_initial(const std::vector<int>& xs, double tau) {
  double v = std::pow(tau, -static_cast<double>(xs.size()));
  for (int x : xs) {
    if (x <= 0 || x % 2 != 0) return 0.0;
    v *= std::pow(tau, x / 2);
  }
  return v;
}

AnsatzReport verify_ansatz(const std::vector<int>& xs, double t, const EvalParams& ev, double dt) {
  const int k = static_cast<int>(xs.size());
  if (k < 1 || k > 3) throw DomainError("verify_ansatz needs 1 <= k <= 3");
  for (int a = 1; a < k; ++a)
    if (xs[a] <= xs[a - 1]) throw DomainError("verify_ansatz needs strictly increasing sites");
  if (!(dt > 0.0) || t - dt < 0.0) throw DomainError("verify_ansatz needs 0 < dt <= t");
  const ModelParams& mp = ev.params;
  auto u = [&](const std::vector<int>& y, double s) { return qtilde_integral(y, s, ev).value; };
  auto rhs = [&](double s) {
    cplx r = 0.0;
    cplx u0 = u(xs, s);
    for (int j = 0; j < k; ++j) {
      std::vector<int> lo = xs, hi = xs;
      --lo[j];
      ++hi[j];
      r += mp.p * u(lo, s) + mp.q * u(hi, s) - u0;
    }
    return r;
  };
  AnsatzReport rep;
  cplx target = rhs(t);
  cplx d1 = (u(xs, t + dt) - u(xs, t - dt)) / (2.0 * dt);
  rep.ode_residual = std::abs(d1 - target);
  if (rep.ode_residual > 1e-6) {
    cplx d2 = (u(xs, t + dt / 2) - u(xs, t - dt / 2)) / dt;
    rep.ode_residual = std::abs((4.0 * d2 - d1) / 3.0 - target);
    rep.richardson_used = true;
  }
  // Boundary condition on every configuration with x_{l+1} = x_l + 1 obtained
  // by moving x_{l+1} next to x_l.
  for (int l = 0; l + 1 < k; ++l) {
    std::vector<int> y = xs;
    y[l + 1] = y[l] + 1;
    bool ordered = true;
    for (int a = 1; a < k; ++a) ordered = ordered && y[a] > y[a - 1];
    if (!ordered) continue;
    std::vector<int> lo = y, hi = y;
    --lo[l + 1];
    ++hi[l];
    double r = std::abs(mp.p * u(lo, t) + mp.q * u(hi, t) - u(y, t));
    rep.boundary_residual = std::max(rep.boundary_residual, r);
    rep.boundary_configs.push_back(y);
  }
  rep.initial_residual = std::abs(u(xs, 0.0) - qtilde_initial(xs, mp.tau));
  return rep;
}

MomentResult nested_moment(int k, int x, double t, const EvalParams& ev) {
  check_time(t);
  if (k < 1 || k > 3) throw GuardError("nested_moment supports 1 <= k <= 3");
  const ModelParams& mp = ev.params;
  const double tau = mp.tau;
  std::vector<Contour> cs = nested_contours(k, mp);
  std::string note;
  // Nearest foreign singularity sits at about twice the piece radius.
  int n = auto_nodes(2.0, k, ev, &note);
  QuadratureRule r = rule_with(ev, n);
  Tabulated T(k);
  std::vector<NodeSet> ns(k);
  for (int a = 0; a < k; ++a) {
    ns[a] = discretize(cs[a], r);
    const int d = static_cast<int>(ns[a].size());
    T.dims[a] = d;
    T.single[a].resize(d);
    for (int i = 0; i < d; ++i) {
      cplx y = ns[a][i].z;
      T.single[a][i] = ns[a][i].w / two_pi_i * big_f_xt(y, x + 1, t, mp) / y;
    }
  }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      auto& p = T.pair[a * k + b];
      p.resize(static_cast<std::size_t>(T.dims[a]) * T.dims[b]);
      for (int i = 0; i < T.dims[a]; ++i)
        for (int j = 0; j < T.dims[b]; ++j) p[i * T.dims[b] + j] = nested_cross(ns[a][i].z, ns[b][j].z, tau);
    }
  MomentResult res = finish(T, std::pow(tau, 0.5 * k * (k - 1)), Method::nested, ev);
  res.note = note;
  return res;
}

MomentResult partition_moment(int k, int x, double t, const EvalParams& ev) {
  check_time(t);
  if (k < 1 || k > 5) throw GuardError("partition_moment supports 1 <= k <= 5");
  const ModelParams& mp = ev.params;
  const double tau = mp.tau;
  Contour c = gamma_mtau_0(mp);
  double R = std::get<Circle>(c.pieces[0]).radius;
  double rate = std::min({R / tau, std::sqrt(tau) / R, tau / (R * R), 1.0 / R});
  MomentResult total;
  total.method = Method::partition;
  total.value = 0.0;
  std::vector<std::string> notes;
  for (const Partition& lam : partitions(k)) {
    const int l = lam.length();
    std::string note;
    int n = auto_nodes(rate, l, ev, &note);
    if (!note.empty()) notes.push_back(note);
    NodeSet nodes = discretize(c, rule_with(ev, n));
    Tabulated T(l);
    T.has_det = true;
    // Per distinct part size: single and diagonal tables.
    for (int a = 0; a < l; ++a) {
      const int la = lam.parts[a];
      T.dims[a] = n;
      T.single[a].resize(n);
      T.det[a * l + a].resize(n);
      for (int i = 0; i < n; ++i) {
        cplx w = nodes[i].z;
        cplx v = nodes[i].w / two_pi_i;
        for (int p = 0; p < la; ++p) {
          cplx yp = std::pow(tau, p) * w;
          v *= big_f_xt(yp, x + 1, t, mp);
          for (int q = p + 1; q < la; ++q) {
            cplx yq = std::pow(tau, q) * w;
            v *= (1.0 - yp * yq / (tau * tau)) / (1.0 - yp * yq / tau);
          }
        }
        T.single[a][i] = v;
        T.det[a * l + a][i] = -1.0 / (w * std::pow(tau, la) - w);
      }
    }
    for (int a = 0; a < l; ++a)
      for (int b = 0; b < l; ++b) {
        if (a == b) continue;
        auto& d = T.det[a * l + b];
        d.resize(static_cast<std::size_t>(n) * n);
        double ta = std::pow(tau, lam.parts[a]);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) d[i * n + j] = -1.0 / (nodes[i].z * ta - nodes[j].z);
        if (b < a) continue;
        auto& p = T.pair[a * l + b];
        p.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            cplx v = 1.0;
            for (int pa = 0; pa < lam.parts[a]; ++pa)
              for (int pb = 0; pb < lam.parts[b]; ++pb) {
                cplx yy = std::pow(tau, pa + pb) * nodes[i].z * nodes[j].z;
                v *= (1.0 - yy / (tau * tau)) / (1.0 - yy / tau);
              }
            p[i * n + j] = v;
          }
      }
    double pre = std::pow(1.0 - tau, k);
    for (int m : lam.multiplicities()) pre /= std::tgamma(m + 1.0);
    MomentResult r = finish(T, pre, Method::partition, ev);
    total.value += r.value;
    total.err_estimate += r.err_estimate;
    total.node_counts.push_back(n);
  }
  double kf = q_factorial(k, tau);
  total.value *= kf;
  total.err_estimate *= kf;
  for (auto& s : notes) total.note += s;
  return total;
}

cplx halfflat_nu(int k, int m, int x, double t, const EvalParams& ev, double* err) {
  check_time(t);
  if (k < 0 || m < 0) throw DomainError("halfflat_nu needs k, m >= 0");
  if (err) *err = 0.0;
  if (k == 0) return m == 0 ? 1.0 : 0.0;
  if (k > 4) throw GuardError("halfflat_nu supports k <= 4");
  const ModelParams& mp = ev.params;
  const double tau = mp.tau;
  Contour c = gamma_m1_0(mp);
  double R = std::get<Circle>(c.pieces[0]).radius;
  double rate = std::min(R, 1.0 / (std::sqrt(tau) * R));
  std::string note;
  int n = auto_nodes(rate, k, ev, &note);
  NodeSet nodes = discretize(c, rule_with(ev, n));
  cplx total = 0.0;
  double e = 0.0;
  for (const Composition& comp : compositions(m, k)) {
    Tabulated T(k);
    T.has_det = true;
    for (int a = 0; a < k; ++a) {
      const int na = comp.parts[a];
      T.dims[a] = n;
      T.single[a].resize(n);
      T.det[a * k + a].resize(n);
      for (int i = 0; i < n; ++i) {
        cplx w = nodes[i].z;
        T.single[a][i] = nodes[i].w / two_pi_i * germ_f(w, double(na), x + 1, t, mp) * germ_g(w, double(na), mp, ev.trunc);
        T.det[a * k + a][i] = -1.0 / (w * std::pow(tau, na) - w);
      }
    }
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        if (a == b) continue;
        auto& d = T.det[a * k + b];
        d.resize(static_cast<std::size_t>(n) * n);
        double ta = std::pow(tau, comp.parts[a]);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) d[i * n + j] = -1.0 / (nodes[i].z * ta - nodes[j].z);
        if (b < a) continue;
        // On the uniform circle w_i w_j depends only on (i + j) mod n.
        std::vector<cplx> h1(n);
        for (int q = 0; q < n; ++q)
          h1[q] = germ_h0(nodes[0].z * nodes[q].z, double(comp.parts[a]), double(comp.parts[b]), mp, ev.trunc);
        auto& p = T.pair[a * k + b];
        p.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) p[i * n + j] = h1[(i + j) % n];
      }
    MomentResult r = finish(T, 1.0, Method::halfflat, ev);
    total += r.value;
    e += r.err_estimate;
  }
  double kf = std::tgamma(k + 1.0);
  if (err) *err = e / kf;
  return total / kf;
}

MomentResult halfflat_moment(int m, int x, double t, const EvalParams& ev) {
  check_time(t);
  if (m < 0 || m > 4) throw GuardError("halfflat_moment supports 0 <= m <= 4");
  MomentResult res;
  res.method = Method::halfflat;
  if (m == 0) {
    res.value = 1.0;
    return res;
  }
  double mf = q_factorial(m, ev.params.tau);
  res.value = 0.0;
  for (int k = 1; k <= m; ++k) {
    double e = 0.0;
    res.value += mf * halfflat_nu(k, m, x, t, ev, &e);
    res.err_estimate += mf * e;
  }
  return res;
}

}  // namespace asep
