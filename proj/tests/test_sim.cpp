#include <cmath>

#include <gtest/gtest.h>

#include "asep/sim.hpp"

using namespace asep;

TEST(Init, HalfFlat) {
  LatticeState s = init_halfflat(-4, 6);
  for (int x = -4; x <= 6; ++x) EXPECT_EQ(s.occupied(x), x > 0 && x % 2 == 0) << x;
  LatticeState e = init_halfflat(-2, 1);
  EXPECT_TRUE(e.pos.empty());
  LatticeState w = init_halfflat(-5, 12);
  for (int x = 0; x <= 12; ++x) EXPECT_EQ(w.count_upto(x), x / 2);
  EXPECT_THROW(init_halfflat(1, 5), DomainError);
}

TEST(Run, ZeroTimeUnchanged) {
  ModelParams m = ModelParams::from_tau(0.5);
  LatticeState s = init_halfflat(-6, 8), ref = s;
  Stream r(1, 0);
  run_until(s, 0.0, m, r);
  EXPECT_EQ(s.occ, ref.occ);
  EXPECT_EQ(s.flux0, 0);
}

TEST(Run, LeftOnlyDynamicsCrossesBond) {
  ModelParams m;
  m.p = 0.0;
  m.q = 1.0;
  m.tau = 0.0;
  m.gamma = 1.0;
  LatticeState s = init_halfflat(-10, 2);
  Stream r(9, 3);
  int last = 2;
  long flux = 0;
  while (s.time < 50.0 && s.pos[0] > -10) {
    run_until(s, s.time + 0.01, m, r);
    EXPECT_LE(s.pos[0], last);
    if (last >= 1 && s.pos[0] <= 0) flux = 1;
    last = s.pos[0];
  }
  EXPECT_EQ(s.pos[0], -10);
  EXPECT_EQ(s.flux0, flux);
  EXPECT_EQ(s.flux0, 1);
}

TEST(Run, ExclusionAndHeight) {
  ModelParams m = ModelParams::from_tau(0.4);
  LatticeState s = init_halfflat(-30, 40);
  Stream r(42, 0);
  long events_seen = 0;
  for (int step = 0; step < 2000; ++step) {
    run_until(s, s.time + 0.05, m, r);
    int count = 0;
    for (auto o : s.occ) count += o;
    ASSERT_EQ(count, static_cast<int>(s.pos.size()));
    for (int x = -30; x <= 40; x += 7) ASSERT_EQ(s.height_flux(x), 2 * s.count_upto(x) - x);
    ++events_seen;
  }
  EXPECT_GT(events_seen, 0);
}

TEST(Run, ExclusionOverManyEvents) {
  ModelParams m = ModelParams::from_tau(0.5);
  LatticeState s = init_halfflat(-200, 400);
  Stream r(5, 1);
  // About 1e6 events: 200 particles for 5000 time units.
  run_until(s, 5000.0, m, r);
  std::vector<int> seen(s.occ.size(), 0);
  for (int p : s.pos) ++seen[p - s.left];
  for (std::size_t i = 0; i < seen.size(); ++i) ASSERT_EQ(seen[i], s.occ[i]);
}

TEST(Mc, DeterministicAtZero) {
  ModelParams m = ModelParams::from_tau(0.5);
  McEstimate e = mc_expectation(Observable::tau_pow_N(1, 4), 0.0, m, 100, 1);
  EXPECT_DOUBLE_EQ(e.mean, 0.25);
  EXPECT_EQ(e.stderr_, 0.0);
  EXPECT_THROW(mc_expectation(Observable::tau_pow_N(1, 4), 0.0, m, 10, 1), DomainError);
  Window w{-3, 3};
  EXPECT_THROW(mc_expectation(Observable::tau_pow_N(1, 9), 0.0, m, 100, 1, &w), DomainError);
}

TEST(Mc, Reproducible) {
  ModelParams m = ModelParams::from_tau(0.5);
  McEstimate a = mc_expectation(Observable::tau_pow_N(1, 0), 1.0, m, 20000, 77);
  McEstimate b = mc_expectation(Observable::tau_pow_N(1, 0), 1.0, m, 20000, 77);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(Mc, AgreesWithCtmc) {
  ModelParams m = ModelParams::from_tau(0.5);
  Window w{-6, 8};
  double ex = ctmc_exact_expectation(Observable::tau_pow_N(1, 2), 0.5, m, w);
  McEstimate e = mc_expectation(Observable::tau_pow_N(1, 2), 0.5, m, 200000, 3, &w);
  EXPECT_LT(std::abs(e.mean - ex), 4.5 * e.stderr_);
}

TEST(Ctmc, ZeroTime) {
  ModelParams m = ModelParams::from_tau(0.5);
  Window w{-6, 8};
  EXPECT_DOUBLE_EQ(ctmc_exact_expectation(Observable::tau_pow_N(1, 4), 0.0, m, w), 0.25);
  EXPECT_DOUBLE_EQ(ctmc_exact_expectation(Observable::qtilde_product({2, 4}), 0.0, m, w), 0.5);
}

TEST(Ctmc, ReferenceValue) {
  ModelParams m = ModelParams::from_tau(0.5);
  Window w{-6, 8};
  CtmcResult r = ctmc_exact_expectations({Observable::tau_pow_N(1, 0), Observable::tau_pow_N(1, 1),
                                          Observable::tau_pow_N(1, 2), Observable::tau_pow_N(1, 3)},
                                         0.25, m, w);
  // Independent dense matrix exponential of the same generator.
  EXPECT_NEAR(r.values[0], 0.99424559170791, 1e-12);
  EXPECT_NEAR(r.values[1], 0.92874292847, 1e-10);
  EXPECT_NEAR(r.values[2], 0.53119553976, 1e-10);
  EXPECT_NEAR(r.values[3], 0.46576830513, 1e-10);
  EXPECT_EQ(r.states, 1365);
}

TEST(Ctmc, Guard) {
  ModelParams m = ModelParams::from_tau(0.5);
  EXPECT_THROW(ctmc_exact_expectation(Observable::tau_pow_N(1, 0), 0.25, m, Window{-14, 20}), GuardError);
}

TEST(Ctmc, HeightIndicatorMatchesN) {
  ModelParams m = ModelParams::from_tau(0.5);
  Window w{-6, 8};
  // h(t,0) = 2 N_0 >= 2 iff N_0 >= 1.
  double pn = 1.0 - ctmc_exact_expectation(Observable::tau_pow_N(1, 0), 0.25, m, w);
  double h = ctmc_exact_expectation(Observable::height_indicator(0, 2), 0.25, m, w);
  // (1 - tau^N) / (1 - tau) >= P(N >= 1) >= (1 - tau^N) when N <= 1 dominates.
  EXPECT_GT(h, 0.0);
  EXPECT_LT(h, pn / (1 - m.tau) + 1e-15);
  EXPECT_GT(h, pn - 1e-15);
}
