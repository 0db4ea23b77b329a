#include "asep/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "asep/airy.hpp"
#include "asep/bose.hpp"
#include "asep/exact.hpp"
#include "asep/sim.hpp"

namespace asep {

bool CriterionResult::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

EvalParams at_tau(double tau) {
  EvalParams ev;
  ev.params = ModelParams::from_tau(tau);
  return ev;
}

Check below(std::string name, double value, double tol, std::string detail = {}) {
  return Check{std::move(name), value < tol, value, tol, std::move(detail)};
}

Check runtime(double seconds, double limit) { return below("runtime [s]", seconds, limit); }

CriterionResult c1(double s) {
  CriterionResult r{1, "cross-formula agreement (nested / partition / half-flat)", {}};
  auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  for (double tau : {0.3, 0.6})
    for (int x : {1, 3})
      for (double t : {0.5, 1.0})
        for (int k = 1; k <= 3; ++k) {
          EvalParams ev = at_tau(tau);
          cplx a = nested_moment(k, x, t, ev).value;
          cplx b = partition_moment(k, x, t, ev).value;
          cplx c = halfflat_moment(k, x, t, ev).value;
          double scale = std::abs(c);
          double g = std::max({std::abs(a - b), std::abs(a - c), std::abs(b - c)}) / scale;
          if (g > worst) {
            worst = g;
            where = fmt::format("tau={} x={} t={} k={}", tau, x, t, k);
          }
        }
  r.checks.push_back(below("max pairwise relative gap", worst, 1e-8 * s, where));
  r.seconds = since(t0);
  r.checks.push_back(runtime(r.seconds, 120.0));
  return r;
}

CriterionResult c2(double s) {
  CriterionResult r{2, "t = 0 exactness", {}};
  auto t0 = Clock::now();
  double worst = 0.0;
  for (double tau : {0.3, 0.5}) {
    EvalParams ev = at_tau(tau);
    for (int m = 1; m <= 3; ++m)
      for (int x = 0; x <= 6; ++x)
        worst = std::max(worst, std::abs(halfflat_moment(m, x, 0.0, ev).value - std::pow(tau, m * (x / 2))));
  }
  r.checks.push_back(below("half-flat moments vs tau^{m floor(x/2)}", worst, 1e-9 * s));
  double wq = 0.0;
  EvalParams ev = at_tau(0.5);
  for (int mask = 1; mask < 64; ++mask) {
    std::vector<int> xs;
    for (int b = 0; b < 6; ++b)
      if (mask & (1 << b)) xs.push_back(b + 1);
    if (xs.size() > 3) continue;
    wq = std::max(wq, std::abs(qtilde_moments(xs, 0.0, ev).value - qtilde_initial(xs, 0.5)));
  }
  r.checks.push_back(below("Qtilde moments vs initial data", wq, 1e-9 * s, "all x in {1..6}, k <= 3"));
  r.seconds = since(t0);
  return r;
}

CriterionResult c3(double s) {
  CriterionResult r{3, "CTMC and Monte Carlo oracles", {}};
  auto t0 = Clock::now();
  EvalParams ev = at_tau(0.5);
  double ref = ctmc_exact_expectation(Observable::tau_pow_N(1, 0), 0.25, ev.params, Window{-6, 8});
  double v = halfflat_moment(1, 0, 0.25, ev).value.real();
  r.checks.push_back(below("CTMC [-6,8] t=0.25 vs half-flat m=1", std::abs(v - ref), 1e-4 * s,
                           fmt::format("ctmc {:.12f}, formula {:.12f}", ref, v)));
  auto mc = mc_expectations({Observable::tau_pow_N(1, 0), Observable::tau_pow_N(2, 0)}, 1.0, ev.params, 1000000, 20240);
  for (int m = 1; m <= 2; ++m) {
    double f = halfflat_moment(m, 0, 1.0, ev).value.real();
    const McEstimate& e = mc[m - 1];
    double z = std::abs(e.mean - f) / e.stderr_;
    r.checks.push_back(below(fmt::format("MC 1e6 bracket m={} [stderr units]", m), z, 4.0 * s,
                             fmt::format("mc {:.6f} +- {:.2e}, formula {:.8f}", e.mean, e.stderr_, f)));
  }
  r.seconds = since(t0);
  r.checks.push_back(runtime(r.seconds, 600.0));
  return r;
}

CriterionResult c4(double s) {
  CriterionResult r{4, "ansatz conditions", {}};
  auto t0 = Clock::now();
  EvalParams ev = at_tau(0.5);
  double ode = 0.0, bnd = 0.0;
  for (const std::vector<int>& xs : {std::vector<int>{2, 3}, {2, 4}, {3, 5}})
    for (double t : {0.3, 0.7}) {
      AnsatzReport a = verify_ansatz(xs, t, ev);
      ode = std::max(ode, a.ode_residual);
      bnd = std::max(bnd, a.boundary_residual);
    }
  r.checks.push_back(below("ODE residual", ode, 1e-6 * s, "tau = 0.5"));
  r.checks.push_back(below("boundary residual", bnd, 1e-7 * s, "tau = 0.5"));
  r.seconds = since(t0);
  return r;
}

CriterionResult c5(double s) {
  CriterionResult r{5, "identity suites", {}};
  auto t0 = Clock::now();
  std::mt19937_64 gen(5);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> site(-6, 8), kd(1, 3), len(1, 12);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    Configuration c{-5, std::vector<std::uint8_t>(len(gen))};
    for (auto& e : c.eta) e = coin(gen);
    worst = std::max(worst, duality_identity_check(c, site(gen), kd(gen), 0.37).gap);
  }
  r.checks.push_back(below("duality gap (1000 configurations)", worst, 1e-12 * s));
  double sym = 0.0;
  for (int k = 1; k <= 4; ++k) sym = std::max(sym, symmetrization_gap(k, 0.45, 100, 9 + k));
  r.checks.push_back(below("symmetrization identity k <= 4", sym, 1e-10 * s));
  double lem = 0.0;
  for (int n = 1; n <= 4; ++n) lem = std::max(lem, lemma_magic_gap(n, 100, 21 + n));
  r.checks.push_back(below("summation lemma N <= 4 (100 draws)", lem, 1e-9 * s));
  r.seconds = since(t0);
  r.checks.push_back(runtime(r.seconds, 30.0));
  return r;
}

CriterionResult c6(double s) {
  CriterionResult r{6, "generating function: series vs Mellin-Barnes", {}};
  auto t0 = Clock::now();
  EvalParams ev = at_tau(0.5);
  LaplaceResult se = tau_laplace_series(-0.2, 2, 0.5, 20, ev);
  LaplaceResult mb = tau_laplace_mb(-0.2, 2, 0.5, 2, ev);
  std::string per;
  for (std::size_t k = 1; k < se.per_k.size(); ++k) per += fmt::format(" k{}={:.3e}", k, se.per_k[k].real());
  r.checks.push_back(below("|series - MB(k_max=2)|", std::abs(se.value - mb.value), 1e-5 * s,
                           fmt::format("series {:.12f}, MB {:.12f}; series terms{}", se.value.real(),
                                       mb.value.real(), per)));
  McEstimate mc = mc_expectation(Observable::etau(-0.2, 2), 0.5, ev.params, 1000000, 20241);
  for (auto [name, v] : {std::pair{"series", se.value.real()}, {"MB", mb.value.real()}}) {
    double z = std::abs(v - mc.mean) / mc.stderr_;
    r.checks.push_back(below(fmt::format("MC bracket {} [stderr units]", name), z, 4.0 * s,
                             fmt::format("mc {:.8f} +- {:.2e}", mc.mean, mc.stderr_)));
  }
  r.seconds = since(t0);
  r.checks.push_back(runtime(r.seconds, 300.0));
  return r;
}

CriterionResult c7(double s) {
  CriterionResult r{7, "delta Bose gas", {}};
  auto t0 = Clock::now();
  BoseParams bp;
  double w1 = 0.0;
  for (auto [x, t] : {std::pair{0.0, 1.0}, {0.5, 0.8}, {-1.0, 2.0}}) {
    double phi = normal_cdf(x / std::sqrt(t));
    w1 = std::max(w1, std::abs(delta_bose_moment({x}, t, bp).value - phi));
    w1 = std::max(w1, std::abs(she_halfflat_moment_collapsed(1, x, t, bp).value - phi));
  }
  r.checks.push_back(below("k=1 evaluators vs Phi(x/sqrt t)", w1, 1e-8 * s));
  BoseParams b50;
  b50.theta = 50.0;
  double tl = std::abs(50.0 * delta_bose_moment({0.0}, 1.0, b50).value - heat_kernel(1.0, 0.0));
  r.checks.push_back(below("theta=50 tilted x theta vs heat kernel", tl, 1e-3 * s, "x = 0, t = 1"));
  double c2 = std::abs(delta_bose_moment({0.5, 0.5 + 1e-9}, 0.8, bp).value -
                       she_halfflat_moment_collapsed(2, 0.5, 0.8, bp).value);
  r.checks.push_back(below("k=2 coincident vs collapsed", c2, 1e-6 * s, "x = 0.5, t = 0.8"));
  double g1 = std::max(weyl_linearity_check(1, 0.0, 1.0, 0.0).gap, weyl_linearity_check(1, 0.0, 1.0, 1.0).gap);
  r.checks.push_back(below("Weyl linearity k=1", g1, 1e-6 * s, "x = 0, t = 1, theta in {0, 1}"));
  double g2 = weyl_linearity_check(2, 0.0, 0.5, 0.0).gap;
  r.checks.push_back(below("Weyl linearity k=2", g2, 1e-4 * s, "x = 0, t = 0.5, theta = 0"));
  r.seconds = since(t0);
  return r;
}

CriterionResult c8(double s) {
  CriterionResult r{8, "Airy 2->1 determinant", {}};
  auto t0 = Clock::now();
  const double c = std::cbrt(2.0);
  double tail = std::abs(halfflat_limit_cdf(0.0, 20.0 / c) - 1.0);
  r.checks.push_back(below("det at lower = 20 vs 1", tail, 1e-6 * s));
  double drop = 0.0;
  for (double x : {-4.0, 0.0, 4.0}) {
    double prev = -INFINITY;
    for (int k = -3; k <= 3; ++k) {
      double f = halfflat_limit_cdf(x, k);
      drop = std::max(drop, prev - f);
      prev = f;
    }
  }
  r.checks.push_back(below("largest decrease in r (x in {-4,0,4})", std::max(drop, 0.0), 1e-12 * s));
  double gm = 0.0, gp = 0.0;
  for (int k = -3; k <= 3; ++k) {
    gm = std::max(gm, std::abs(halfflat_limit_cdf(-8.0, k) - airy_oracles(c * k).f_airy2));
    gp = std::max(gp, std::abs(halfflat_limit_cdf(8.0, k) - airy_oracles(k).f_airy1));
  }
  r.checks.push_back(below("x=-8 vs Airy2 oracle F2(2^{1/3} r)", gm, 5e-3 * s, "gap decays like 1/|x|"));
  r.checks.push_back(below("x=+8 vs Airy1-type oracle det(I - B)_(r,inf)", gp, 5e-3 * s));
  double st = 0.0;
  for (double x : {-4.0, 0.0, 4.0})
    for (int k : {-2, 0, 1}) {
      KernelSpec k2;
      NystromGrid g2;
      k2.ray_length += 2.0;
      k2.nodes_per_ray *= 2;
      g2.n *= 2;
      g2.span += 4.0;
      st = std::max(st, std::abs(halfflat_limit_cdf(x, k) - halfflat_limit_cdf(x, k, k2, g2)));
    }
  r.checks.push_back(below("grid doubling stability", st, 1e-5 * s));
  r.seconds = since(t0);
  r.checks.push_back(runtime(r.seconds, 900.0));
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, double tol_scale) {
  if (!(tol_scale > 0.0)) throw DomainError("tol_scale must be positive");
  switch (id) {
    case 1: return c1(tol_scale);
    case 2: return c2(tol_scale);
    case 3: return c3(tol_scale);
    case 4: return c4(tol_scale);
    case 5: return c5(tol_scale);
    case 6: return c6(tol_scale);
    case 7: return c7(tol_scale);
    case 8: return c8(tol_scale);
  }
  throw DomainError(fmt::format("no criterion {}", id));
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "identities") return {5};
  if (suite == "moments") return {1, 2, 3, 4};
  if (suite == "laplace") return {6};
  if (suite == "bose") return {7};
  if (suite == "airy") return {8};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8};
  throw DomainError(fmt::format("unknown suite '{}'", suite));
}

}  // namespace asep
