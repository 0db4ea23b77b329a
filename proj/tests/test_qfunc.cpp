#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "asep/qfunc.hpp"

using namespace asep;

namespace {

cplx long_product(cplx a, double q, int n) {
  cplx r = 1.0;
  for (int j = 0; j < n; ++j) r *= 1.0 - std::pow(q, j) * a;
  return r;
}

}  // namespace

TEST(ModelParams, Consistency) {
  ModelParams m = ModelParams::from_tau(0.5);
  EXPECT_NEAR(m.p + m.q, 1.0, 1e-15);
  EXPECT_NEAR(m.tau * m.q, m.p, 1e-15);
  EXPECT_NEAR(m.gamma, m.q - m.p, 1e-15);
  ModelParams n = ModelParams::from_p(1.0 / 3.0);
  EXPECT_NEAR(n.tau, 0.5, 1e-15);
  EXPECT_THROW(ModelParams::from_tau(1.0), DomainError);
  EXPECT_THROW(ModelParams::from_p(0.6), DomainError);
}

TEST(Poch, Trivial) {
  EXPECT_EQ(poch_inf(0.0, 0.5), cplx(1.0));
  EXPECT_EQ(poch_inf(1.0, 0.5), cplx(0.0));
  EXPECT_THROW(poch_inf(0.3, 1.0), DomainError);
  EXPECT_THROW(poch_inf(0.3, -0.2), DomainError);
}

TEST(Poch, AgainstLongProduct) {
  EXPECT_NEAR(std::abs(poch_inf(0.5, 0.5) - long_product(0.5, 0.5, 200)), 0.0, 1e-12);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double q : {0.3, 0.5, 0.8}) {
    double rmax = 1.0 / std::sqrt(q);
    for (int i = 0; i < 200; ++i) {
      cplx a(u(gen) * rmax, u(gen) * rmax);
      if (std::abs(a) >= rmax) continue;
      PochResult pr = poch_inf_ex(a, q);
      cplx ref = long_product(a, q, 10 * pr.terms);
      EXPECT_LT(std::abs(pr.value - ref), 1e-14 * (1.0 + std::abs(pr.value)) * 10) << a << " q=" << q;
      EXPECT_GE(pr.tail_bound, 0.0);
    }
  }
}

TEST(QGamma, Values) {
  EXPECT_NEAR(std::abs(q_gamma(1.0, 0.5) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(q_gamma(2.0, 0.5) - 1.0), 0.0, 1e-14);
  QTruncation tr;
  tr.max_terms = 200000;
  EXPECT_NEAR(q_gamma(3.0, 0.999, tr).real(), 2.0, 1e-2);
  EXPECT_THROW(q_gamma(0.0, 0.5), PoleError);
  EXPECT_THROW(q_gamma(-2.0, 0.5), PoleError);
}

TEST(QGamma, FunctionalEquation) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (double q : {0.3, 0.6}) {
    for (int i = 0; i < 50; ++i) {
      double x = u(gen);
      cplx lhs = q_gamma(x + 1.0, q);
      cplx rhs = (1.0 - std::pow(q, x)) / (1.0 - q) * q_gamma(x, q);
      EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::abs(lhs));
    }
  }
}

TEST(QFactorial, Values) {
  EXPECT_DOUBLE_EQ(q_factorial(0, 0.5), 1.0);
  EXPECT_NEAR(q_factorial(2, 0.5), 1.5, 1e-15);
  EXPECT_NEAR(q_factorial(3, 0.5), 2.625, 1e-14);
}

TEST(QBinomial, PascalRecursion) {
  EXPECT_NEAR(q_binomial(5, 0, 0.3), 1.0, 1e-15);
  EXPECT_NEAR(q_binomial(2, 1, 0.5), 1.5, 1e-15);
  EXPECT_THROW(q_binomial(2, 3, 0.5), DomainError);
  EXPECT_THROW(q_binomial(2, -1, 0.5), DomainError);
  double q = 0.5;
  for (int n = 1; n <= 8; ++n)
    for (int k = 1; k < n; ++k) {
      double rec = q_binomial(n - 1, k - 1, q) + std::pow(q, k) * q_binomial(n - 1, k, q);
      EXPECT_NEAR(q_binomial(n, k, q), rec, 1e-12);
    }
}

TEST(QExp, Series) {
  EXPECT_NEAR(std::abs(q_exp(0.0, 0.5) - 1.0), 0.0, 1e-15);
  auto series = [](cplx x, double q) {
    cplx s = 0.0, pw = 1.0;
    for (int k = 0; k <= 60; ++k) {
      s += pw / q_factorial(k, q);
      pw *= x;
    }
    return s;
  };
  EXPECT_LT(std::abs(q_exp(0.3, 0.5) - series(0.3, 0.5)), 1e-12);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-0.63, 0.63);
  for (int i = 0; i < 100; ++i) {
    cplx x(u(gen), u(gen));
    EXPECT_LT(std::abs(q_exp(x, 0.4) - series(x, 0.4)), 1e-10);
  }
  double big = q_exp(-1e6, 0.5).real();
  EXPECT_GT(big, 0.0);
  EXPECT_LT(big, 1e-3);
  EXPECT_THROW(q_exp(2.0, 0.5), PoleError);
}

TEST(Germs, F) {
  ModelParams m = ModelParams::from_tau(0.5);
  EXPECT_NEAR(std::abs(germ_f(cplx(0.3, 0.2), 0.0, 3, 1.0, m) - 1.0), 0.0, 1e-15);
  cplx n(0.7, 0.4);
  EXPECT_NEAR(std::abs(germ_f(0.0, n, 3, 1.0, m) - std::pow(cplx(1.0 - m.tau), n)), 0.0, 1e-15);
  double w = 0.5, tau = m.tau, t = 1.0;
  double direct = (1 - tau) * std::exp((m.q - m.p) * t * (1 / (1 + w) - 1 / (1 + tau * w))) *
                  std::pow((1 + tau * w) / (1 + w), 2);
  EXPECT_NEAR(germ_f(w, 1.0, 3, t, m).real(), direct, 1e-14);
  EXPECT_THROW(germ_f(-1.0, 1.0, 3, 1.0, m), PoleError);
}

TEST(Germs, G) {
  ModelParams m = ModelParams::from_tau(0.5);
  EXPECT_NEAR(std::abs(germ_g(cplx(0.4, 0.1), 0.0, m) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(germ_g(0.0, cplx(1.3, 0.2), m) - 1.0), 0.0, 1e-15);
  // Integer n: finite rewrite (-w;tau)_n (tau^n w^2;tau)_n^{-1}.
  double w = 0.4, tau = 0.5;
  int n = 2;
  double fin = 1.0;
  for (int j = 0; j < n; ++j) fin *= (1 + std::pow(tau, j) * w) / (1 - std::pow(tau, n + j) * w * w);
  EXPECT_NEAR(germ_g(w, 2.0, m).real(), fin, 1e-12);
}

TEST(Germs, H) {
  ModelParams m = ModelParams::from_tau(0.5);
  cplx w1(0.3, 0.4), w2(-0.5, 0.2);
  EXPECT_NEAR(std::abs(germ_h(w1, w2, 0.0, 1.7, m) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(germ_h(0.0, w2, 1.2, 1.7, m) - 1.0), 0.0, 1e-15);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-0.9, 0.9), s(0.5, 3.0);
  for (int i = 0; i < 100; ++i) {
    cplx a(u(gen), u(gen)), b(u(gen), u(gen)), n1(s(gen), u(gen)), n2(s(gen), u(gen));
    EXPECT_LT(std::abs(germ_h(a, b, n1, n2, m) - germ_h(b, a, n2, n1, m)), 1e-14);
  }
}

TEST(Germs, H0GeneratingFunctionShape) {
  // g(x) = h0(x; s1, s2) on real s_i >= 1/2 is 1 at 0, in [0,1] and nonincreasing.
  for (double tau : {0.3, 0.6}) {
    ModelParams m = ModelParams::from_tau(tau);
    for (double s1 : {0.5, 1.0, 2.5})
      for (double s2 : {0.5, 1.7, 4.0}) {
        const int n = 101;
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) g[i] = germ_h0(i / double(n - 1), s1, s2, m).real();
        EXPECT_NEAR(g[0], 1.0, 1e-15);
        EXPECT_GE(g[n - 1], -1e-15);
        for (int i = 1; i < n; ++i) EXPECT_LE(g[i], g[i - 1] + 1e-14);
      }
  }
}

TEST(Germs, H0NotConcaveEverywhere) {
  // Concave for small exponents, but not for s1 = 2.5, s2 = 4 near x = 0.
  ModelParams m = ModelParams::from_tau(0.3);
  auto d2 = [&](double s1, double s2, double x, double h) {
    return (germ_h0(x + h, s1, s2, m) - 2.0 * germ_h0(x, s1, s2, m) + germ_h0(x - h, s1, s2, m)).real() / (h * h);
  };
  EXPECT_LT(d2(0.5, 0.5, 0.05, 1e-3), 0.0);
  EXPECT_GT(d2(2.5, 4.0, 0.01, 1e-3), 0.0);
}
