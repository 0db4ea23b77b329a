#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "asep/exact.hpp"

namespace asep {

int Composition::weight() const { return std::accumulate(parts.begin(), parts.end(), 0); }

std::vector<int> Partition::multiplicities() const {
  int top = parts.empty() ? 0 : parts.front();
  std::vector<int> m(top + 1, 0);
  for (int p : parts) ++m[p];
  return m;
}

namespace {

void comp_rec(int left, int k, std::vector<int>& cur, std::vector<Composition>& out) {
  if (k == 0) {
    if (left == 0) out.push_back({cur});
    return;
  }
  for (int p = 1; p <= left - (k - 1); ++p) {
    cur.push_back(p);
    comp_rec(left - p, k - 1, cur, out);
    cur.pop_back();
  }
}

void part_rec(int left, int maxp, std::vector<int>& cur, std::vector<Partition>& out) {
  if (left == 0) {
    out.push_back({cur});
    return;
  }
  for (int p = std::min(left, maxp); p >= 1; --p) {
    cur.push_back(p);
    part_rec(left - p, p, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Composition> compositions(int m, int k) {
  if (m < 0 || k < 0) throw DomainError("compositions needs m, k >= 0");
  std::vector<Composition> out;
  std::vector<int> cur;
  comp_rec(m, k, cur, out);
  return out;
}

std::vector<Partition> partitions(int k) {
  if (k < 0) throw DomainError("partitions needs k >= 0");
  std::vector<Partition> out;
  std::vector<int> cur;
  part_rec(k, k, cur, out);
  std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) { return a.parts < b.parts; });
  return out;
}

int Configuration::n_upto(int x) const {
  int n = 0;
  for (int i = 0; i < static_cast<int>(eta.size()) && left + i <= x; ++i) n += eta[i];
  return n;
}

DualityGap duality_identity_check(const Configuration& eta, int x, int k, double tau) {
  if (k < 0 || k > 4) throw DomainError("duality check supports 0 <= k <= 4");
  DualityGap g;
  g.lhs = std::pow(tau, k * eta.n_upto(x));
  // Occupied sites at or left of x with weight tau^{N_{y-1}}.
  std::vector<double> v;
  for (int i = 0; i < static_cast<int>(eta.eta.size()); ++i) {
    int y = eta.left + i;
    if (y > x) break;
    if (eta.eta[i]) v.push_back(std::pow(tau, eta.n_upto(y - 1)));
  }
  const int n = static_cast<int>(v.size());
  double rhs = 1.0;
  for (int l = 1; l <= k; ++l) {
    // Brute force over increasing l-tuples.
    double s = 0.0;
    if (l <= n) {
      std::vector<int> idx(l);
      std::iota(idx.begin(), idx.end(), 0);
      while (true) {
        double pr = 1.0;
        for (int i : idx) pr *= v[i];
        s += pr;
        int j = l - 1;
        while (j >= 0 && idx[j] == n - l + j) --j;
        if (j < 0) break;
        ++idx[j];
        for (int i = j + 1; i < l; ++i) idx[i] = idx[i - 1] + 1;
      }
    }
    double sign = (l % 2) ? -1.0 : 1.0;
    rhs += sign * q_binomial(k, l, tau) * q_poch_finite(tau, l) * s;
  }
  g.rhs = rhs;
  g.gap = std::abs(g.lhs - g.rhs);
  return g;
}

namespace {

cplx random_point(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(gen), u(gen)};
}

// Draws n points with pairwise distance at least 1e-8 (and |z| >= 1e-8).
std::vector<cplx> draw(std::mt19937_64& gen, int n) {
  std::vector<cplx> z(n);
  for (int a = 0; a < n; ++a) {
    bool ok;
    do {
      z[a] = random_point(gen);
      ok = std::abs(z[a]) > 1e-8;
      for (int b = 0; b < a; ++b) ok = ok && std::abs(z[a] - z[b]) > 1e-8;
    } while (!ok);
  }
  return z;
}

}  // namespace

double symmetrization_gap(int k, double tau, int samples, std::uint64_t seed) {
  if (k < 1 || k > 5) throw DomainError("symmetrization check supports 1 <= k <= 5");
  std::mt19937_64 gen(seed);
  double worst = 0.0;
  const double target = q_factorial(k, tau);
  for (int s = 0; s < samples; ++s) {
    std::vector<cplx> y = draw(gen, k);
    std::vector<int> sig(k);
    std::iota(sig.begin(), sig.end(), 0);
    cplx total = 0.0;
    do {
      cplx pr = 1.0;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < a; ++b) pr *= (y[sig[a]] - tau * y[sig[b]]) / (y[sig[a]] - y[sig[b]]);
      total += pr;
    } while (std::next_permutation(sig.begin(), sig.end()));
    worst = std::max(worst, std::abs(total - target));
  }
  return worst;
}

double lemma_magic_gap(int n, int samples, std::uint64_t seed) {
  if (n < 1 || n > 5) throw DomainError("symmetrization check supports 1 <= N <= 5");
  std::mt19937_64 gen(seed);
  const cplx I(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<cplx> q;
    cplx kappa;
    bool ok;
    do {
      q = draw(gen, n);
      kappa = random_point(gen);
      ok = true;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) ok = ok && std::abs(q[a] + q[b]) > 1e-8;
      // Partial sums of the measure must stay away from zero too.
      std::vector<int> sig(n);
      std::iota(sig.begin(), sig.end(), 0);
      do {
        cplx part = 0.0;
        for (int a = 0; a < n; ++a) {
          part += q[sig[a]];
          ok = ok && std::abs(part) > 1e-8;
        }
      } while (ok && std::next_permutation(sig.begin(), sig.end()));
    } while (!ok);
    cplx prod_q = 1.0;
    for (cplx v : q) prod_q *= v;
    std::vector<int> sig(n);
    std::iota(sig.begin(), sig.end(), 0);
    cplx lhs = 0.0;
    do {
      cplx mu = prod_q;
      cplx part = 0.0;
      for (int a = 0; a < n; ++a) {
        part += q[sig[a]];
        mu /= part;
      }
      cplx pr = 1.0;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          pr *= (q[sig[a]] - q[sig[b]] - I * kappa) / (q[sig[a]] - q[sig[b]]);
      lhs += mu * pr;
    } while (std::next_permutation(sig.begin(), sig.end()));
    cplx rhs = 1.0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) rhs *= (q[a] + q[b] + I * kappa) / (q[a] + q[b]);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace asep
