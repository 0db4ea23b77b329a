#include "asep/qfunc.hpp"

#include <algorithm>
#include <cmath>

namespace asep {

ModelParams ModelParams::from_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0,1)");
  ModelParams m;
  m.tau = tau;
  m.q = 1.0 / (1.0 + tau);
  m.p = tau * m.q;
  m.gamma = m.q - m.p;
  return m;
}

ModelParams ModelParams::from_p(double p) {
  if (!(p > 0.0 && p < 0.5)) throw DomainError("p must lie in (0,1/2)");
  ModelParams m;
  m.p = p;
  m.q = 1.0 - p;
  m.tau = p / m.q;
  m.gamma = m.q - m.p;
  return m;
}

namespace {

void check_q(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q-parameter must lie in (0,1)");
}

// Number of factors after which |q^n a| falls below the tolerance.
int poch_terms(double absa, double q, const QTruncation& tr) {
  double target = tr.tol * (1.0 - q) / std::max(1.0, absa);
  if (absa <= target) return 1;
  double n = std::ceil(std::log(target / absa) / std::log(q));
  return static_cast<int>(std::clamp(n, 1.0, static_cast<double>(tr.max_terms)));
}

// Denominator Pochhammer: rejects vanishing factors.
cplx poch_den(cplx a, double q, const QTruncation& tr, const char* what) {
  int n = poch_terms(std::abs(a), q, tr);
  cplx r = 1.0;
  cplx f = a;
  for (int j = 0; j < n; ++j) {
    cplx d = 1.0 - f;
    if (std::abs(d) < 1e-13) throw PoleError(what);
    r *= d;
    f *= q;
  }
  return r;
}

}  // namespace

PochResult poch_inf_ex(cplx a, double q, const QTruncation& trunc) {
  check_q(q);
  double absa = std::abs(a);
  int n = poch_terms(absa, q, trunc);
  cplx r = 1.0;
  cplx f = a;
  for (int j = 0; j < n; ++j) {
    r *= 1.0 - f;
    f *= q;
  }
  double rest = absa * std::pow(q, n);
  double tail = rest < 1.0 ? rest / (1.0 - q) / (1.0 - rest) : INFINITY;
  return {r, tail, n};
}

cplx poch_inf(cplx a, double q, const QTruncation& trunc) { return poch_inf_ex(a, q, trunc).value; }

cplx q_gamma(cplx x, double q, const QTruncation& trunc) {
  check_q(q);
  cplx qx = std::exp(x * std::log(q));
  // Ratio taken factor by factor so (q;q) and (q^x;q) never underflow alone.
  int n = std::max(poch_terms(q, q, trunc), poch_terms(std::abs(qx), q, trunc));
  cplx r = 1.0;
  double fn = q;
  cplx fd = qx;
  for (int j = 0; j < n; ++j) {
    cplx d = 1.0 - fd;
    if (std::abs(d) < 1e-13) throw PoleError("q-Gamma pole");
    r *= (1.0 - fn) / d;
    fn *= q;
    fd *= q;
  }
  return std::exp((1.0 - x) * std::log(1.0 - q)) * r;
}

double q_factorial(int m, double q) {
  if (m < 0) throw DomainError("q_factorial needs m >= 0");
  double r = 1.0;
  for (int a = 1; a <= m; ++a) r *= (1.0 - std::pow(q, a)) / (1.0 - q);
  return r;
}

double q_binomial(int n, int k, double q) {
  if (k < 0 || k > n) throw DomainError("q_binomial needs 0 <= k <= n");
  return q_factorial(n, q) / (q_factorial(k, q) * q_factorial(n - k, q));
}

cplx q_exp(cplx x, double q, const QTruncation& trunc) {
  check_q(q);
  return 1.0 / poch_den((1.0 - q) * x, q, trunc, "q-exponential pole");
}

double q_poch_finite(double q, int l) {
  double r = 1.0;
  for (int a = 1; a <= l; ++a) r *= 1.0 - std::pow(q, a);
  return r;
}

cplx tau_pow(double tau, cplx s) { return std::exp(s * std::log(tau)); }

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

cplx germ_f(cplx w, cplx n, int x, double t, const ModelParams& mp) {
  if (std::abs(1.0 + w) == 0.0) throw PoleError("germ_f: w = -1");
  cplx tn = tau_pow(mp.tau, n);
  cplx tw = 1.0 + tn * w;
  cplx pre = std::exp(n * std::log(1.0 - mp.tau));
  cplx ex = std::exp((mp.q - mp.p) * t * (1.0 / (1.0 + w) - 1.0 / tw));
  return pre * ex * ipow(tw / (1.0 + w), x - 1);
}

cplx germ_g(cplx w, cplx n, const ModelParams& mp, const QTruncation& trunc) {
  double tau = mp.tau;
  cplx tn = tau_pow(tau, n);
  cplx w2 = w * w;
  cplx num = poch_inf(-w, tau, trunc) * poch_inf(tn * tn * w2, tau, trunc);
  cplx den = poch_den(-tn * w, tau, trunc, "germ_g pole") * poch_den(tn * w2, tau, trunc, "germ_g pole");
  return num / den;
}

cplx germ_h0(cplx z, cplx s1, cplx s2, const ModelParams& mp, const QTruncation& trunc) {
  double tau = mp.tau;
  cplx t1 = tau_pow(tau, s1);
  cplx t2 = tau_pow(tau, s2);
  cplx num = poch_inf(z, tau, trunc) * poch_inf(t1 * t2 * z, tau, trunc);
  cplx den = poch_den(t1 * z, tau, trunc, "germ_h pole") * poch_den(t2 * z, tau, trunc, "germ_h pole");
  return num / den;
}

cplx germ_h(cplx w1, cplx w2, cplx n1, cplx n2, const ModelParams& mp, const QTruncation& trunc) {
  return germ_h0(w1 * w2, n1, n2, mp, trunc);
}

}  // namespace asep
