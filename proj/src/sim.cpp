#include "asep/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <Eigen/SparseCore>
#include <fmt/format.h>

#include "asep/quad.hpp"

namespace asep {

int LatticeState::count_upto(int x) const {
  int n = 0;
  for (int y = left; y <= std::min(x, right); ++y) n += occ[y - left];
  return n;
}

int LatticeState::height_flux(int x) const {
  int h = 2 * static_cast<int>(flux0);
  if (x > 0)
    for (int y = 1; y <= x; ++y) h += occupied(y) ? 1 : -1;
  else
    for (int y = x + 1; y <= 0; ++y) h -= occupied(y) ? 1 : -1;
  return h;
}

LatticeState init_halfflat(int left, int right) {
  if (left > 0 || right < 0 || left > right) throw DomainError("window must contain 0");
  LatticeState st;
  st.left = left;
  st.right = right;
  st.occ.assign(static_cast<std::size_t>(right - left + 1), 0);
  for (int x = 2; x <= right; x += 2) {
    st.occ[x - left] = 1;
    st.pos.push_back(x);
  }
  return st;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t replica)
    : s_(mix64(seed ^ 0x6A09E667F3BCC909ULL) ^ mix64(replica + 0x9E3779B97F4A7C15ULL)) {}

std::uint64_t Stream::next() {
  s_ += 0x9E3779B97F4A7C15ULL;
  return mix64(s_);
}

double Stream::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

double Stream::exponential(double rate) { return -std::log(uniform()) / rate; }

void run_until(LatticeState& st, double t, const ModelParams& mp, Stream& rng) {
  const int n = static_cast<int>(st.pos.size());
  if (n == 0 || t <= st.time) {
    st.time = std::max(st.time, t);
    return;
  }
  double clock = st.time;
  for (;;) {
    clock += rng.exponential(n);
    if (clock > t) break;
    int i = static_cast<int>(rng.uniform() * n);
    if (i >= n) i = n - 1;
    int from = st.pos[i];
    int to = rng.uniform() < mp.p ? from + 1 : from - 1;
    if (to < st.left || to > st.right || st.occ[to - st.left]) continue;
    st.occ[from - st.left] = 0;
    st.occ[to - st.left] = 1;
    st.pos[i] = to;
    if (from == 1 && to == 0) ++st.flux0;
    if (from == 0 && to == 1) --st.flux0;
  }
  st.time = t;
}

Observable Observable::tau_pow_N(int k, int x) {
  Observable o;
  o.kind = Kind::tau_pow_N;
  o.k = k;
  o.xs = {x};
  return o;
}

Observable Observable::qtilde_product(std::vector<int> xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1]) throw DomainError("qtilde_product needs increasing sites");
  Observable o;
  o.kind = Kind::qtilde_product;
  o.k = static_cast<int>(xs.size());
  o.xs = std::move(xs);
  return o;
}

Observable Observable::etau(double zeta, int x) {
  Observable o;
  o.kind = Kind::etau_of_zeta_tauN;
  o.zeta = zeta;
  o.xs = {x};
  return o;
}

Observable Observable::height_indicator(int x, int threshold) {
  Observable o;
  o.kind = Kind::height_indicator;
  o.xs = {x};
  o.threshold = threshold;
  return o;
}

int Observable::max_site() const { return *std::max_element(xs.begin(), xs.end()); }
int Observable::min_site() const { return *std::min_element(xs.begin(), xs.end()); }

namespace {

double etau_value(double zeta, int n, double tau) {
  return q_exp(cplx(zeta * std::pow(tau, n), 0.0), tau).real();
}

}  // namespace

double Observable::eval(const LatticeState& st, const ModelParams& mp) const {
  if (min_site() < st.left || max_site() > st.right) throw DomainError("observable site outside the window");
  const double tau = mp.tau;
  switch (kind) {
    case Kind::tau_pow_N: return std::pow(tau, k * st.count_upto(xs[0]));
    case Kind::qtilde_product: {
      double v = 1.0;
      for (int x : xs) {
        if (!st.occupied(x)) return 0.0;
        v *= std::pow(tau, st.count_upto(x - 1));
      }
      return v;
    }
    case Kind::etau_of_zeta_tauN: return etau_value(zeta, st.count_upto(xs[0]), tau);
    case Kind::height_indicator: return st.height_flux(xs[0]) >= threshold ? 1.0 : 0.0;
  }
  return 0.0;
}

double Observable::eval_mask(std::uint64_t mask, int left, const ModelParams& mp) const {
  const double tau = mp.tau;
  auto upto = [&](int x) {
    int b = x - left;
    if (b < 0) return 0;
    if (b >= 63) return std::popcount(mask);
    return std::popcount(mask & ((std::uint64_t{1} << (b + 1)) - 1));
  };
  auto occ = [&](int x) {
    int b = x - left;
    return b >= 0 && b < 64 && ((mask >> b) & 1);
  };
  switch (kind) {
    case Kind::tau_pow_N: return std::pow(tau, k * upto(xs[0]));
    case Kind::qtilde_product: {
      double v = 1.0;
      for (int x : xs) {
        if (!occ(x)) return 0.0;
        v *= std::pow(tau, upto(x - 1));
      }
      return v;
    }
    case Kind::etau_of_zeta_tauN: return etau_value(zeta, upto(xs[0]), tau);
    case Kind::height_indicator: {
      // Closed window with every particle starting right of 0: flux0 = N_0.
      int x = xs[0];
      int h = 2 * upto(x) - x;
      return h >= threshold ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

Window default_window(const std::vector<Observable>& obs, double t) {
  int lo = obs.front().min_site(), hi = obs.front().max_site();
  for (const auto& o : obs) {
    lo = std::min(lo, o.min_site());
    hi = std::max(hi, o.max_site());
  }
  int w = static_cast<int>(std::ceil(4.0 * t)) + 32;
  return {std::min(0, lo - w), std::max(0, hi + w)};
}

std::vector<McEstimate> mc_expectations(const std::vector<Observable>& obs, double t, const ModelParams& mp,
                                        long samples, std::uint64_t seed, const Window* window) {
  if (samples < 100) throw DomainError("mc_expectation needs at least 100 samples");
  if (t < 0.0) throw DomainError("time must be nonnegative");
  Window win = window ? *window : default_window(obs, t);
  for (const auto& o : obs)
    if (o.min_site() < win.left || o.max_site() > win.right) throw DomainError("observable site outside the window");
  const LatticeState init = init_halfflat(win.left, win.right);
  const std::size_t m = obs.size();
  std::vector<double> vals(static_cast<std::size_t>(samples) * m);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < samples; ++r) {
    LatticeState st = init;
    Stream rng(seed, static_cast<std::uint64_t>(r));
    run_until(st, t, mp, rng);
    for (std::size_t j = 0; j < m; ++j) vals[static_cast<std::size_t>(r) * m + j] = obs[j].eval(st, mp);
  }
  std::vector<McEstimate> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<cplx> s(static_cast<std::size_t>(samples)), s2(static_cast<std::size_t>(samples));
    for (long r = 0; r < samples; ++r) s[r] = vals[static_cast<std::size_t>(r) * m + j];
    double mean = pairwise_sum(s).real() / samples;
    for (long r = 0; r < samples; ++r) {
      double d = vals[static_cast<std::size_t>(r) * m + j] - mean;
      s2[r] = d * d;
    }
    double var = pairwise_sum(s2).real() / (samples - 1);
    out[j] = {mean, std::sqrt(var / samples)};
  }
  return out;
}

McEstimate mc_expectation(const Observable& obs, double t, const ModelParams& mp, long samples,
                          std::uint64_t seed, const Window* window) {
  return mc_expectations({obs}, t, mp, samples, seed, window)[0];
}

long ctmc_state_count(Window w) {
  int sites = w.right - w.left + 1;
  int n = w.right >= 2 ? w.right / 2 : 0;
  double c = 1.0;
  for (int i = 0; i < n; ++i) c = c * (sites - i) / (i + 1);
  return static_cast<long>(std::llround(std::min(c, 1e18)));
}

CtmcResult ctmc_exact_expectations(const std::vector<Observable>& obs, double t, const ModelParams& mp,
                                   Window win, double tol) {
  if (t < 0.0) throw DomainError("time must be nonnegative");
  if (win.left > 0 || win.right < 0) throw DomainError("window must contain 0");
  const int sites = win.right - win.left + 1;
  if (sites > 63) throw GuardError(fmt::format("window of {} sites exceeds the 63-site encoding", sites));
  long count = ctmc_state_count(win);
  if (count > kMaxCtmcStates)
    throw GuardError(fmt::format("window [{}, {}] has {} states, cap is {}", win.left, win.right, count, kMaxCtmcStates));
  for (const auto& o : obs)
    if (o.min_site() < win.left || o.max_site() > win.right) throw DomainError("observable site outside the window");

  const int n = win.right >= 2 ? win.right / 2 : 0;
  std::vector<std::uint64_t> states;
  states.reserve(static_cast<std::size_t>(count));
  if (n == 0) {
    states.push_back(0);
  } else {
    // Gosper's hack enumerates n-subsets in increasing order.
    std::uint64_t v = (std::uint64_t{1} << n) - 1, limit = std::uint64_t{1} << sites;
    while (v < limit) {
      states.push_back(v);
      std::uint64_t c = v & (~v + 1), r = v + c;
      v = (((r ^ v) >> 2) / c) | r;
    }
  }
  auto index_of = [&](std::uint64_t s) {
    return static_cast<long>(std::lower_bound(states.begin(), states.end(), s) - states.begin());
  };
  std::uint64_t init = 0;
  for (int x = 2; x <= win.right; x += 2) init |= std::uint64_t{1} << (x - win.left);

  const double lam = std::max(1, n);
  std::vector<Eigen::Triplet<double, long>> trip;
  trip.reserve(states.size() * 4);
  for (std::size_t i = 0; i < states.size(); ++i) {
    std::uint64_t s = states[i];
    double out_rate = 0.0;
    for (int b = 0; b < sites; ++b) {
      if (!((s >> b) & 1)) continue;
      if (b + 1 < sites && !((s >> (b + 1)) & 1)) {
        std::uint64_t ns = s ^ (std::uint64_t{3} << b);
        trip.emplace_back(index_of(ns), static_cast<long>(i), mp.p / lam);
        out_rate += mp.p;
      }
      if (b > 0 && !((s >> (b - 1)) & 1)) {
        std::uint64_t ns = s ^ (std::uint64_t{3} << (b - 1));
        trip.emplace_back(index_of(ns), static_cast<long>(i), mp.q / lam);
        out_rate += mp.q;
      }
    }
    trip.emplace_back(static_cast<long>(i), static_cast<long>(i), 1.0 - out_rate / lam);
  }
  // Column-stochastic transpose of the uniformized chain: pi_{j+1} = P^T pi_j.
  Eigen::SparseMatrix<double, Eigen::RowMajor, long> pt(static_cast<long>(states.size()),
                                                        static_cast<long>(states.size()));
  pt.setFromTriplets(trip.begin(), trip.end());
  trip.clear();
  trip.shrink_to_fit();

  Eigen::VectorXd pi = Eigen::VectorXd::Zero(static_cast<long>(states.size()));
  pi[index_of(init)] = 1.0;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(pi.size());
  const double lt = lam * t;
  double mass = 0.0;
  int terms = 0;
  double logw = -lt;
  for (int j = 0;; ++j) {
    double weight = std::exp(logw);
    acc += weight * pi;
    mass += weight;
    ++terms;
    if (lt == 0.0 || (1.0 - mass < tol && j > lt)) break;
    if (j > 100000) throw GuardError("uniformization did not converge");
    pi = pt * pi;
    logw += std::log(lt) - std::log(j + 1.0);
  }
  CtmcResult res;
  res.states = static_cast<long>(states.size());
  res.poisson_terms = terms;
  for (const auto& o : obs) {
    double e = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i)
      if (acc[static_cast<long>(i)] != 0.0) e += acc[static_cast<long>(i)] * o.eval_mask(states[i], win.left, mp);
    res.values.push_back(e);
  }
  return res;
}

double ctmc_exact_expectation(const Observable& obs, double t, const ModelParams& mp, Window window,
                              double tol) {
  return ctmc_exact_expectations({obs}, t, mp, window, tol).values[0];
}

}  // namespace asep
