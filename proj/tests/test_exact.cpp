#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "asep/exact.hpp"
#include "asep/sim.hpp"

using namespace asep;

namespace {

EvalParams at_tau(double tau) {
  EvalParams ev;
  ev.params = ModelParams::from_tau(tau);
  return ev;
}

}  // namespace

TEST(Eps, Values) {
  ModelParams m = ModelParams::from_p(1.0 / 3.0);
  EXPECT_NEAR(std::abs(eps(1.0, m)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(eps(2.0, m) - 0.5), 0.0, 1e-15);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    cplx xi(u(gen), u(gen));
    EXPECT_LT(std::abs(eps(xi, m) - eps(m.tau / xi, m)), 1e-12 * (1.0 + std::abs(eps(xi, m))));
  }
  EXPECT_THROW(eps(0.0, m), PoleError);
}

TEST(Eps, TildeAndHat) {
  ModelParams m = ModelParams::from_tau(0.4);
  EXPECT_NEAR(std::abs(eps_tilde(0.0, m)), 0.0, 1e-16);
  for (cplx z : {cplx(0.3, 0.2), cplx(-1.5, 0.7), cplx(2.0, -1.0)}) {
    cplx map = (1.0 - m.tau * z) / (1.0 - z);
    EXPECT_LT(std::abs(eps_tilde(z, m) - eps(map, m)), 1e-14 * (1.0 + std::abs(eps(map, m))));
    EXPECT_EQ(eps_hat(z, m), eps_tilde(-z / m.tau, m));
  }
  EXPECT_THROW(eps_tilde(1.0, m), PoleError);
  EXPECT_THROW(eps_tilde(1.0 / m.tau, m), PoleError);
}

TEST(Combinatorics, Compositions) {
  auto c = compositions(5, 3);
  ASSERT_EQ(c.size(), 6u);
  EXPECT_EQ(c.front().parts, (std::vector<int>{1, 1, 3}));
  EXPECT_EQ(c.back().parts, (std::vector<int>{3, 1, 1}));
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LT(c[i - 1].parts, c[i].parts);
  for (auto& x : c) EXPECT_EQ(x.weight(), 5);
  EXPECT_TRUE(compositions(2, 3).empty());
  EXPECT_EQ(compositions(0, 0).size(), 1u);
}

TEST(Combinatorics, Partitions) {
  EXPECT_EQ(partitions(5).size(), 7u);
  EXPECT_EQ(partitions(4).size(), 5u);
  for (auto& p : partitions(6)) {
    int s = 0, l = 0;
    auto m = p.multiplicities();
    for (std::size_t a = 1; a < m.size(); ++a) s += static_cast<int>(a) * m[a], l += m[a];
    EXPECT_EQ(s, 6);
    EXPECT_EQ(l, p.length());
    EXPECT_TRUE(std::is_sorted(p.parts.rbegin(), p.parts.rend()));
  }
}

TEST(Qtilde, InitialData) {
  EvalParams ev = at_tau(0.5);
  EXPECT_NEAR(qtilde_moments({2, 4}, 0.0, ev).value.real(), 0.5, 1e-8);
  EXPECT_NEAR(std::abs(qtilde_moments({1, 4}, 0.0, ev).value), 0.0, 1e-10);
  for (int mask = 1; mask < 64; ++mask) {
    std::vector<int> xs;
    for (int b = 0; b < 6; ++b)
      if (mask >> b & 1) xs.push_back(b + 1);
    if (xs.size() > 3) continue;
    MomentResult r = qtilde_moments(xs, 0.0, ev);
    EXPECT_NEAR(std::abs(r.value - qtilde_initial(xs, 0.5)), 0.0, 1e-9) << "mask " << mask;
  }
  EXPECT_THROW(qtilde_moments({3, 3}, 0.1, ev), DomainError);
  EXPECT_THROW(qtilde_moments({4, 2}, 0.1, ev), DomainError);
}

TEST(Qtilde, MatchesCtmc) {
  EvalParams ev = at_tau(0.5);
  double ref = ctmc_exact_expectation(Observable::qtilde_product({2}), 0.5, ev.params, Window{-6, 8});
  EXPECT_NEAR(qtilde_moments({2}, 0.5, ev).value.real(), ref, 1e-4);
  double ref2 = ctmc_exact_expectation(Observable::qtilde_product({1, 2}), 0.5, ev.params, Window{-6, 8});
  EXPECT_NEAR(qtilde_moments({1, 2}, 0.5, ev).value.real(), ref2, 1e-4);
}

TEST(Ansatz, Residuals) {
  EvalParams ev = at_tau(0.5);
  AnsatzReport a = verify_ansatz({2, 3}, 0.7, ev);
  EXPECT_LT(a.boundary_residual, 1e-7);
  ASSERT_EQ(a.boundary_configs.size(), 1u);
  AnsatzReport b = verify_ansatz({2, 4}, 0.5, ev);
  EXPECT_LT(b.ode_residual, 1e-6);
  EXPECT_LT(b.initial_residual, 1e-9);
  EXPECT_LT(b.boundary_residual, 1e-7);
}

TEST(Moments, InitialData) {
  for (double tau : {0.3, 0.5}) {
    EvalParams ev = at_tau(tau);
    for (int m = 1; m <= 3; ++m)
      for (int x = 0; x <= 6; ++x)
        EXPECT_NEAR(halfflat_moment(m, x, 0.0, ev).value.real(), std::pow(tau, m * (x / 2)), 1e-9)
            << "m " << m << " x " << x;
    EXPECT_NEAR(nested_moment(1, 4, 0.0, ev).value.real(), tau * tau, 1e-12);
    for (int k = 1; k <= 4; ++k) EXPECT_NEAR(partition_moment(k, 2, 0.0, ev).value.real(), std::pow(tau, k), 1e-9);
  }
}

TEST(Moments, MatchCtmc) {
  EvalParams ev = at_tau(0.5);
  std::vector<Observable> obs;
  for (int x = 0; x <= 3; ++x) obs.push_back(Observable::tau_pow_N(1, x));
  obs.push_back(Observable::tau_pow_N(2, 1));
  CtmcResult ref = ctmc_exact_expectations(obs, 0.25, ev.params, Window{-6, 8});
  for (int x = 0; x <= 3; ++x) {
    EXPECT_NEAR(halfflat_moment(1, x, 0.25, ev).value.real(), ref.values[x], 1e-4);
    EXPECT_NEAR(nested_moment(1, x, 0.25, ev).value.real(), ref.values[x], 1e-4);
  }
  EXPECT_NEAR(partition_moment(2, 1, 0.25, ev).value.real(), ref.values[4], 1e-4);
}

TEST(Moments, TripleAgreement) {
  for (double tau : {0.3, 0.6})
    for (int x : {1, 3})
      for (double t : {0.5, 1.0})
        for (int k = 1; k <= 3; ++k) {
          EvalParams ev = at_tau(tau);
          MomentResult a = nested_moment(k, x, t, ev);
          MomentResult b = partition_moment(k, x, t, ev);
          MomentResult c = halfflat_moment(k, x, t, ev);
          double scale = std::abs(c.value);
          EXPECT_LT(std::abs(a.value - b.value), 1e-8 * scale);
          EXPECT_LT(std::abs(a.value - c.value), 1e-8 * scale);
          EXPECT_LT(std::abs(b.value - c.value), 1e-8 * scale);
          for (auto* r : {&a, &b, &c}) EXPECT_LT(std::abs(r->value.imag()), 1e-9);
        }
}

TEST(Moments, RangeAndMonotonicity) {
  EvalParams ev = at_tau(0.4);
  for (double t : {0.3, 1.0}) {
    double prev_m = 1.0;
    for (int m = 1; m <= 3; ++m) {
      double v = halfflat_moment(m, 2, t, ev).value.real();
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, prev_m + 1e-12);
      prev_m = v;
    }
    double prev_x = 1.0;
    for (int x = -2; x <= 4; ++x) {
      double v = halfflat_moment(2, x, t, ev).value.real();
      EXPECT_LE(v, prev_x + 1e-12);
      EXPECT_LE(v, 1.0 + 1e-12);
      prev_x = v;
    }
  }
}

TEST(Moments, Guards) {
  EvalParams ev = at_tau(0.5);
  EXPECT_THROW(nested_moment(4, 1, 0.5, ev), GuardError);
  EXPECT_THROW(halfflat_moment(5, 1, 0.5, ev), GuardError);
  EXPECT_THROW(partition_moment(6, 1, 0.5, ev), GuardError);
  EXPECT_THROW(halfflat_moment(1, 1, -0.5, ev), DomainError);
  EXPECT_EQ(halfflat_moment(0, 3, 0.5, ev).value, cplx(1.0));
}

TEST(Moments, MonteCarloBracket) {
  EvalParams ev = at_tau(0.5);
  McEstimate mc = mc_expectation(Observable::tau_pow_N(1, 0), 1.0, ev.params, 200000, 17);
  double v = halfflat_moment(1, 0, 1.0, ev).value.real();
  EXPECT_LT(std::abs(mc.mean - v), 4.0 * mc.stderr_);
}

TEST(Laplace, Trivial) {
  EvalParams ev = at_tau(0.5);
  EXPECT_EQ(tau_laplace_series(0.0, 2, 0.5, 20, ev).value, cplx(1.0));
  EXPECT_THROW(tau_laplace_series(1.0, 2, 0.5, 20, ev), DomainError);
  EXPECT_THROW(tau_laplace_series(-0.2, 2, 0.5, 4, ev), DomainError);
  EXPECT_THROW(tau_laplace_mb(0.3, 2, 0.5, 2, ev), DomainError);
  EXPECT_THROW(tau_laplace_mb(-0.2, 2, 0.5, 3, ev), GuardError);
  EXPECT_NEAR(std::abs(tau_laplace_mb(-1e-9, 2, 0.5, 1, ev).value - 1.0), 0.0, 1e-8);
}

TEST(Laplace, MellinBarnesGeometric) {
  for (cplx z : {cplx(-0.2), cplx(-0.7)}) EXPECT_LT(std::abs(mb_geometric(z, 0.7, 12.0, 0.05) - z / (1.0 - z)), 1e-10);
  // Off the negative axis the integrand decays only like exp(-(pi - |arg(-z)|) |Im s|).
  cplx z(0.3, 0.4);
  EXPECT_LT(std::abs(mb_geometric(z, 0.7, 40.0, 0.05) - z / (1.0 - z)), 1e-10);
}

TEST(Laplace, SeriesMatchesMellinBarnesPerK) {
  EvalParams ev = at_tau(0.5);
  LaplaceResult s = tau_laplace_series(-0.2, 2, 0.5, 20, ev, 3);
  LaplaceResult m = tau_laplace_mb(-0.2, 2, 0.5, 2, ev);
  ASSERT_EQ(s.per_k.size(), 4u);
  ASSERT_EQ(m.per_k.size(), 3u);
  EXPECT_NEAR(s.per_k[1].real(), -0.10272991755, 1e-9);
  EXPECT_LT(std::abs(s.per_k[1] - m.per_k[1]), 1e-8);
  EXPECT_LT(std::abs(s.per_k[2] - m.per_k[2]), 1e-8);
  // The k = 3 term is what separates the two truncations.
  EXPECT_LT(std::abs((s.value - m.value) - s.per_k[3]), 1e-8);
  EXPECT_GT(std::abs(s.per_k[3]), 1e-5);
  EXPECT_GT(s.value.real(), 0.0);
  EXPECT_LE(s.value.real(), 1.0);
}

TEST(Duality, Examples) {
  Configuration one{0, {1}};
  DualityGap g = duality_identity_check(one, 0, 1, 0.3);
  EXPECT_DOUBLE_EQ(g.lhs, 0.3);
  EXPECT_NEAR(g.rhs, 0.3, 1e-15);
  Configuration empty{-3, {0, 0, 0, 0}};
  for (int k = 0; k <= 4; ++k) {
    DualityGap e = duality_identity_check(empty, 0, k, 0.3);
    EXPECT_EQ(e.lhs, 1.0);
    EXPECT_EQ(e.rhs, 1.0);
  }
}

TEST(Duality, RandomConfigurations) {
  std::mt19937_64 gen(5);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> site(-6, 8), kd(1, 3);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    Configuration c{-5, std::vector<std::uint8_t>(10)};
    for (auto& e : c.eta) e = coin(gen);
    worst = std::max(worst, duality_identity_check(c, site(gen), kd(gen), 0.37).gap);
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Symmetrization, MacdonaldIdentity) {
  std::mt19937_64 gen(1);
  std::vector<cplx> y = {cplx(0.3, 0.1), cplx(-0.4, 0.7)};
  double tau = 0.45;
  cplx s = (y[1] - tau * y[0]) / (y[1] - y[0]) + (y[0] - tau * y[1]) / (y[0] - y[1]);
  EXPECT_NEAR(std::abs(s - (1.0 + tau)), 0.0, 1e-12);
  for (int k = 1; k <= 4; ++k) EXPECT_LT(symmetrization_gap(k, tau, 50, 9 + k), 1e-10) << "k " << k;
}

TEST(Symmetrization, SummationLemma) {
  EXPECT_LT(lemma_magic_gap(2, 100, 4), 1e-12);
  for (int n = 1; n <= 4; ++n) EXPECT_LT(lemma_magic_gap(n, 100, 21 + n), 1e-9) << "N " << n;
}
