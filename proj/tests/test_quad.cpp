#include <cmath>

#include <boost/math/special_functions/airy.hpp>
#include <gtest/gtest.h>

#include "asep/quad.hpp"

using namespace asep;

TEST(Closed, Residues) {
  Circle unit{0.0, 1.0, 1};
  EXPECT_NEAR(std::abs(integrate_closed([](cplx z) { return 1.0 / z; }, unit, 16) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(integrate_closed([](cplx z) { return z * z; }, unit, 16)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(integrate_closed([](cplx z) { return 1.0 / (z - 0.3); }, unit, 64) - 1.0), 0.0, 1e-12);
  EXPECT_THROW(integrate_closed([](cplx z) { return z; }, unit, 4), DomainError);
  cplx nan = integrate_closed([](cplx) { return cplx(NAN, 0.0); }, unit, 16);
  EXPECT_TRUE(std::isnan(nan.real()));
}

TEST(Closed, ClusteredMapStaysExact) {
  Circle c{0.0, 1.2, 1, 0.7, 2, 0.0};
  auto f = [](cplx z) { return std::exp(1.0 / (1.0 + z)) / z; };
  // Residue at 0 is e; the essential singularity at -1 adds Res = -e + 1.
  cplx exact = std::exp(1.0) + (1.0 - std::exp(1.0));
  EXPECT_LT(std::abs(integrate_closed(f, c, 256) - exact), 1e-10);
  Circle plain{0.0, 1.2, 1};
  EXPECT_GT(std::abs(integrate_closed(f, plain, 64) - exact), std::abs(integrate_closed(f, c, 64) - exact));
}

TEST(Path, MellinBarnesGeometric) {
  double zeta = -0.3;
  auto f = [&](cplx s) { return pi / std::sin(-pi * s) * std::exp(s * std::log(cplx(-zeta))); };
  QuadratureRule r;
  r.panel_length = 0.25;
  MomentResult res = integrate_path(f, mb_line(0.5, 12.0), r);
  EXPECT_LT(std::abs(res.value - zeta / (1 - zeta)), 1e-8);
}

TEST(Path, AiryWedge) {
  for (double x : {0.0, 0.7, 2.5}) {
    auto f = [&](cplx z) { return std::exp(z * z * z / 3.0 - x * z); };
    MomentResult r = integrate_path(f, airy_wedge_in(1.0, 8.0), QuadratureRule{});
    EXPECT_NEAR(r.value.real(), boost::math::airy_ai(x), 1e-12);
    EXPECT_NEAR(r.value.imag(), 0.0, 1e-12);
    EXPECT_FALSE(r.truncation_warning);
  }
  MomentResult z = integrate_path([](cplx s) { return std::exp(s * s * s / 3.0); }, airy_wedge_in(1.0, 8.0), {});
  EXPECT_NEAR(z.value.real(), 0.3550280538878172, 1e-12);
  auto grow = [](cplx s) { return std::exp(s * s * s / 3.0); };
  EXPECT_TRUE(integrate_path(grow, airy_wedge_in(1.0, 1.0), {}).truncation_warning);
}

TEST(Path, TwoCircleGamma) {
  ModelParams m = ModelParams::from_tau(0.5);
  QuadratureRule rule;
  rule.nodes_per_piece = 256;
  MomentResult r = integrate_path([](cplx z) { return 1.0 / z + 1.0 / (z + 1.0); }, gamma_m1_0(m), rule);
  EXPECT_NEAR(std::abs(r.value - 2.0), 0.0, 1e-13);
}

TEST(Product, Basics) {
  Contour unit{{Circle{0.0, 1.0, 1}}};
  auto inv = [](const cplx* z) { return 1.0 / (z[0] * z[1]); };
  MomentResult r = integrate_product(inv, {unit, unit}, QuadratureRule{});
  EXPECT_NEAR(std::abs(r.value - 1.0), 0.0, 1e-13);
  auto anti = [](const cplx* z) { return (z[0] - z[1]) * std::exp(z[0] + 2.0 * z[1]) * std::exp(2.0 * z[0] + z[1]) / (z[0] * z[1]); };
  EXPECT_LT(std::abs(integrate_product(anti, {unit, unit}, QuadratureRule{}).value), 1e-13);
  auto sep = [](const cplx* z) { return 1.0 / ((z[0] - 0.2) * (z[1] + 0.4) * (z[2] - cplx(0.1, 0.3))); };
  EXPECT_NEAR(std::abs(integrate_product(sep, {unit, unit, unit}, QuadratureRule{}).value - 1.0), 0.0, 1e-10);
  std::vector<Contour> five(5, unit);
  EXPECT_THROW(integrate_product([](const cplx*) { return cplx(1.0); }, five, QuadratureRule{}), GuardError);
}

TEST(Product, SerialAndParallelBitIdentical) {
  Contour c{{Circle{0.1, 1.3, 1}}};
  auto f = [](const cplx* z) { return std::exp(z[0] * z[1]) / ((z[0] - 0.3) * (z[1] + 0.2) * (z[2] - 0.5)) * z[2]; };
  QuadratureRule r;
  r.nodes_per_piece = 48;
  MomentResult a = integrate_product(f, {c, c, c}, r);
  MomentResult b = integrate_product_serial(f, {c, c, c}, r);
  EXPECT_EQ(a.value, b.value);
}

TEST(Product, PermutationConsistent) {
  Contour c{{Circle{0.0, 1.1, 1}}};
  auto f = [](const cplx* z) { return std::exp(z[0] - 0.3 * z[1] * z[1]) / ((z[0] - 0.2) * (z[1] + 0.5)); };
  auto g = [&](const cplx* z) {
    cplx s[2] = {z[1], z[0]};
    return f(s);
  };
  MomentResult a = integrate_product(f, {c, c}, QuadratureRule{});
  MomentResult b = integrate_product(g, {c, c}, QuadratureRule{});
  EXPECT_LT(std::abs(a.value - b.value), 1e-13);
}

TEST(Product, DoublingWithinErrorEstimate) {
  Contour c{{Circle{0.0, 1.0, 1}}};
  auto f = [](const cplx* z) { return std::exp(z[0] * z[1]) / ((z[0] - 0.6) * (z[1] - 0.5)); };
  QuadratureRule r;
  r.nodes_per_piece = 32;
  MomentResult a = integrate_product(f, {c, c}, r);
  r.nodes_per_piece = 64;
  MomentResult b = integrate_product(f, {c, c}, r);
  EXPECT_LE(std::abs(a.value - b.value), 10 * a.err_estimate + 1e-15);
  EXPECT_GE(a.err_estimate, 0.0);
}

TEST(Nested, Geometry) {
  ModelParams m = ModelParams::from_tau(0.5);
  auto one = nested_contours(1, m);
  ASSERT_EQ(one.size(), 1u);
  for (const Piece& p : one[0].pieces) {
    const Circle& c = std::get<Circle>(p);
    EXPECT_LT(std::abs(c.center) + c.radius, std::sqrt(m.tau));
  }
  auto three = nested_contours(3, m);
  double r[3];
  for (int a = 0; a < 3; ++a) r[a] = std::get<Circle>(three[a].pieces[1]).radius;
  EXPECT_LT(r[0], m.tau * r[1]);
  EXPECT_LT(m.tau * r[1], m.tau * m.tau * r[2]);
  // Image check on the 0-pieces: tau times contour b encloses contour a.
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) EXPECT_GT(m.tau * r[b], r[a]);
  for (double tau : {0.1, 0.3, 0.6, 0.9}) {
    auto cs = nested_contours(3, ModelParams::from_tau(tau));
    NestingReport rep = check_nesting(cs, tau);
    EXPECT_TRUE(rep.ok) << rep.detail;
    EXPECT_GT(rep.min_margin, 1e-6);
  }
  EXPECT_THROW(nested_contours(0, m), DomainError);
  EXPECT_THROW(nested_contours(400, m), DomainError);
  std::vector<Contour> bad = {Contour{{Circle{0.0, 0.2, 1}}}, Contour{{Circle{0.0, 0.2, 1}}}};
  EXPECT_FALSE(check_nesting(bad, 0.5).ok);
}

TEST(Standard, Families) {
  ModelParams m = ModelParams::from_tau(0.5);
  EXPECT_NEAR(c_one_rho_default(0.5), 0.5 * std::min(std::sqrt(2.0) - 1.0, 1.0 / 3.0), 1e-15);
  Contour c1 = c_one_rho(m);
  const Circle& cc = std::get<Circle>(c1.pieces[0]);
  EXPECT_GT(min_distance(c1, 1.0 / std::sqrt(m.tau)), 1e-6);
  EXPECT_GT(min_distance(c1, -1.0 / std::sqrt(m.tau)), 1e-6);
  // Cross poles z_a = tau z_b never meet the circle.
  EXPECT_LT(cc.center.real() + cc.radius, (cc.center.real() - cc.radius) / m.tau);
  EXPECT_THROW(c_one_rho(m, 0.6), DomainError);

  Contour g = gamma_m1_0(m);
  EXPECT_NEAR(std::get<Circle>(g.pieces[0]).radius, 0.5 * (1 + std::sqrt(2.0)), 1e-15);
  EXPECT_THROW(gamma_m1_0(m, 2.0), DomainError);
  Contour gt = gamma_mtau_0(m);
  EXPECT_GT(min_distance(gt, std::sqrt(m.tau)), 1e-6);
  EXPECT_GT(min_distance(gt, -m.tau), 1e-6);
  EXPECT_TRUE(g.closed());

  Contour d = d_theta_m(0.3, 2.0, 10.0);
  ASSERT_EQ(d.pieces.size(), 5u);
  EXPECT_TRUE(std::holds_alternative<Ray>(d.pieces[0]));
  EXPECT_EQ(std::get<Segment>(d.pieces[2]).z0, cplx(0.5, -0.3));
  EXPECT_EQ(std::get<Segment>(d.pieces[2]).z1, cplx(0.5, 0.3));
  EXPECT_FALSE(d.closed());

  Contour gb = gamma_bar(0.0, 0.3, 1.0, 0.2);
  EXPECT_TRUE(gb.closed());
  MomentResult w = integrate_path([](cplx z) { return 1.0 / z + 1.0 / (z - 1.0) + 1.0 / (z - 0.5); }, gb, {});
  EXPECT_NEAR(std::abs(w.value - 3.0), 0.0, 1e-12);
  MomentResult out = integrate_path([](cplx z) { return 1.0 / (z - 2.0); }, gb, {});
  EXPECT_LT(std::abs(out.value), 1e-12);
}
