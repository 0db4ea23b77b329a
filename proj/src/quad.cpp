#include "asep/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <fmt/format.h>
#include <gsl/gsl_integration.h>

namespace asep {

std::string method_name(Method m) {
  switch (m) {
    case Method::closed: return "closed";
    case Method::path: return "path";
    case Method::product: return "product";
    case Method::nested: return "nested";
    case Method::partition: return "partition";
    case Method::halfflat: return "halfflat";
    case Method::qtilde: return "qtilde";
    case Method::series: return "series";
    case Method::mellin_barnes: return "mb";
    case Method::bose: return "bose";
    case Method::other: break;
  }
  return "other";
}

bool Contour::closed() const {
  if (pieces.empty()) return false;
  bool all_circles = std::all_of(pieces.begin(), pieces.end(),
                                 [](const Piece& p) { return std::holds_alternative<Circle>(p); });
  if (all_circles) return true;
  for (const Piece& p : pieces)
    if (std::holds_alternative<Ray>(p) || std::holds_alternative<Circle>(p)) return false;
  auto start = [](const Piece& p) -> cplx {
    if (auto s = std::get_if<Segment>(&p)) return s->z0;
    const Arc& a = std::get<Arc>(p);
    return a.center + a.radius * std::polar(1.0, a.theta0);
  };
  auto end = [](const Piece& p) -> cplx {
    if (auto s = std::get_if<Segment>(&p)) return s->z1;
    const Arc& a = std::get<Arc>(p);
    return a.center + a.radius * std::polar(1.0, a.theta1);
  };
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& nx = pieces[(i + 1) % pieces.size()];
    if (std::abs(end(pieces[i]) - start(nx)) > 1e-12) return false;
  }
  return true;
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &g.x[i], &g.w[i], tab);
  gsl_integration_glfixed_table_free(tab);
  std::vector<int> ord(n);
  for (int i = 0; i < n; ++i) ord[i] = i;
  std::sort(ord.begin(), ord.end(), [&](int a, int b) { return g.x[a] < g.x[b]; });
  GaussRule s;
  for (int i : ord) {
    s.x.push_back(g.x[i]);
    s.w.push_back(g.w[i]);
  }
  return cache.emplace(n, std::move(s)).first->second;
}

namespace {

constexpr int kPanel = 16;

int panel_count(double len, const QuadratureRule& rule) {
  int by_len = static_cast<int>(std::ceil(len / rule.panel_length));
  int by_nodes = (rule.nodes_per_piece + kPanel - 1) / kPanel;
  return std::max({1, by_len, by_nodes});
}

// Composite Gauss-Legendre on a real parameter interval [a,b].
void panels(double a, double b, int np, std::vector<double>& xs, std::vector<double>& ws) {
  const GaussRule& g = gauss_legendre(kPanel);
  double h = (b - a) / np;
  for (int p = 0; p < np; ++p) {
    double lo = a + p * h;
    for (int i = 0; i < kPanel; ++i) {
      xs.push_back(lo + 0.5 * h * (g.x[i] + 1.0));
      ws.push_back(0.5 * h * g.w[i]);
    }
  }
}

struct Discretizer {
  const QuadratureRule& rule;

  NodeSet operator()(const Circle& c) const {
    if (c.radius <= 0.0) throw DomainError("circle radius must be positive");
    if (std::abs(c.cluster_strength) >= 1.0) throw DomainError("cluster strength must be below 1");
    int n = rule.nodes_per_piece;
    NodeSet out(n);
    double m = c.cluster_folds;
    double beta = c.cluster_strength;
    for (int j = 0; j < n; ++j) {
      double s = 2.0 * pi * j / n;
      double th = s - (beta / m) * std::sin(m * (s - c.cluster_phase));
      double dth = 1.0 - beta * std::cos(m * (s - c.cluster_phase));
      cplx e = std::polar(1.0, th);
      out[j].z = c.center + c.radius * e;
      out[j].w = static_cast<double>(c.orientation) * cplx(0.0, 1.0) * c.radius * e * dth * (2.0 * pi / n);
    }
    return out;
  }

  NodeSet operator()(const Segment& s) const {
    double len = std::abs(s.z1 - s.z0);
    std::vector<double> xs, ws;
    panels(0.0, 1.0, panel_count(len, rule), xs, ws);
    NodeSet out(xs.size());
    cplx d = s.z1 - s.z0;
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = {s.z0 + xs[i] * d, ws[i] * d};
    return out;
  }

  NodeSet operator()(const Arc& a) const {
    double len = std::abs(a.theta1 - a.theta0) * a.radius;
    std::vector<double> xs, ws;
    panels(a.theta0, a.theta1, panel_count(len, rule), xs, ws);
    NodeSet out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      cplx e = std::polar(1.0, xs[i]);
      out[i] = {a.center + a.radius * e, cplx(0.0, 1.0) * a.radius * e * ws[i]};
    }
    return out;
  }

  NodeSet operator()(const Ray& r) const {
    if (r.length <= 0.0) throw DomainError("ray length must be positive");
    std::vector<double> xs, ws;
    panels(0.0, r.length, panel_count(r.length, rule), xs, ws);
    cplx e = std::polar(1.0, r.angle);
    NodeSet out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      out[i] = {r.origin + xs[i] * e, static_cast<double>(r.direction) * ws[i] * e};
    return out;
  }
};

}  // namespace

NodeSet discretize(const Piece& piece, const QuadratureRule& rule) {
  if (rule.nodes_per_piece < 8) throw DomainError("nodes_per_piece must be at least 8");
  return std::visit(Discretizer{rule}, piece);
}

NodeSet discretize(const Contour& c, const QuadratureRule& rule) {
  NodeSet all;
  for (const Piece& p : c.pieces) {
    NodeSet s = discretize(p, rule);
    all.insert(all.end(), s.begin(), s.end());
  }
  return all;
}

cplx pairwise_sum(std::vector<cplx>& v) {
  std::size_t n = v.size();
  if (n == 0) return 0.0;
  while (n > 1) {
    std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (n & 1) v[half] = v[n - 1];
    n = half + (n & 1);
  }
  return v[0];
}

void check_product_cost(const std::vector<int>& dims) {
  double total = 1.0;
  for (int d : dims) total *= d;
  if (total > static_cast<double>(kMaxProductNodes))
    throw GuardError(fmt::format("tensor grid needs {:.3g} nodes, cap is {}", total, kMaxProductNodes));
}

// Nested contours. Every -tau piece has radius r; the 0-pieces shrink
// geometrically, R_a = R_k (theta tau)^(k-a).
std::vector<Contour> nested_contours(int k, const ModelParams& mp) {
  if (k < 1) throw DomainError("nested_contours needs k >= 1");
  double tau = mp.tau;
  double r = 0.5 * tau * (1.0 - tau) / (1.0 + tau);
  double rk = 0.5 * (tau - r);
  double shrink = 0.5 * tau;
  std::vector<Contour> out;
  for (int a = 1; a <= k; ++a) {
    double ra = rk * std::pow(shrink, k - a);
    if (ra < 1e-120) throw DomainError(fmt::format("nested radii underflow at k = {}", k));
    Contour c;
    c.pieces.push_back(Circle{cplx(-tau, 0.0), r, 1});
    c.pieces.push_back(Circle{cplx(0.0, 0.0), ra, 1});
    out.push_back(std::move(c));
  }
  NestingReport rep = check_nesting(out, tau);
  if (!rep.ok) throw DomainError("nested contour schedule failed its own check: " + rep.detail);
  return out;
}

namespace {

// Margin by which the circle (c2, r2) avoids the open disk (c1, r1): positive
// when the circle lies outside the disk or encloses it.
double avoid_margin(cplx c1, double r1, cplx c2, double r2) {
  double d = std::abs(c1 - c2);
  double outside = d - r1 - r2;
  double encloses = r2 - d - r1;
  return std::max(outside, encloses);
}

}  // namespace

NestingReport check_nesting(const std::vector<Contour>& cs, double tau) {
  NestingReport rep;
  rep.min_margin = INFINITY;
  double st = std::sqrt(tau);
  auto note = [&](double m, const std::string& what) {
    if (m < rep.min_margin) rep.min_margin = m;
    if (m <= 1e-6 && rep.ok) {
      rep.ok = false;
      rep.detail = what;
    }
  };
  for (std::size_t a = 0; a < cs.size(); ++a) {
    for (const Piece& p : cs[a].pieces) {
      const Circle* c = std::get_if<Circle>(&p);
      if (!c) {
        note(-1.0, "nested pieces must be circles");
        continue;
      }
      note(std::abs(c->center - st) - c->radius, fmt::format("+tau^1/2 inside contour {}", a + 1));
      note(std::abs(c->center + st) - c->radius, fmt::format("-tau^1/2 inside contour {}", a + 1));
    }
    for (std::size_t b = a + 1; b < cs.size(); ++b)
      for (const Piece& pa : cs[a].pieces)
        for (const Piece& pb : cs[b].pieces) {
          const Circle* ca = std::get_if<Circle>(&pa);
          const Circle* cb = std::get_if<Circle>(&pb);
          if (!ca || !cb) continue;
          note(avoid_margin(ca->center, ca->radius, tau * cb->center, tau * cb->radius),
               fmt::format("contour {} includes the tau-image of contour {}", a + 1, b + 1));
        }
  }
  return rep;
}

double c_one_rho_default(double tau) {
  return 0.5 * std::min(1.0 / std::sqrt(tau) - 1.0, (1.0 - tau) / (1.0 + tau));
}

Contour c_one_rho(const ModelParams& mp, double rho) {
  double tau = mp.tau;
  double bound = std::min(1.0 / std::sqrt(tau) - 1.0, (1.0 - tau) / (1.0 + tau));
  if (rho == 0.0) rho = c_one_rho_default(tau);
  if (!(rho > 0.0 && rho < bound))
    throw DomainError(fmt::format("C(1,rho) radius {} outside (0, {})", rho, bound));
  return Contour{{Circle{cplx(1.0, 0.0), rho, 1}}};
}

Contour gamma_m1_0(const ModelParams& mp, double radius, double cluster) {
  double hi = 1.0 / std::sqrt(mp.tau);
  if (radius == 0.0) radius = 0.5 * (1.0 + hi);
  if (!(radius > 1.0 && radius < hi))
    throw DomainError(fmt::format("gamma(-1,0) radius {} outside (1, {})", radius, hi));
  return Contour{{Circle{cplx(0.0, 0.0), radius, 1, cluster, 2, 0.0}}};
}

Contour gamma_mtau_0(const ModelParams& mp, double radius, double cluster) {
  double lo = mp.tau, hi = std::sqrt(mp.tau);
  if (radius == 0.0) radius = 0.5 * (lo + hi);
  if (!(radius > lo && radius < hi))
    throw DomainError(fmt::format("gamma(-tau,0) radius {} outside ({}, {})", radius, lo, hi));
  return Contour{{Circle{cplx(0.0, 0.0), radius, 1, cluster, 2, 0.0}}};
}

Contour d_theta_m(double theta, double M, double tail_length) {
  if (!(theta > 0.0) || !(M > 0.5)) throw DomainError("D(theta,M) needs theta > 0 and M > 1/2");
  cplx lo(M, -theta), hi(M, theta);
  Contour c;
  c.pieces.push_back(Ray{lo, -pi / 2, tail_length, -1});
  c.pieces.push_back(Segment{lo, cplx(0.5, -theta)});
  c.pieces.push_back(Segment{cplx(0.5, -theta), cplx(0.5, theta)});
  c.pieces.push_back(Segment{cplx(0.5, theta), hi});
  c.pieces.push_back(Ray{hi, pi / 2, tail_length, 1});
  return c;
}

Contour gamma_bar(double x1, double r1, double x2, double r2) {
  if (!(r1 > 0.0 && r2 > 0.0) || !(x1 < x2)) throw DomainError("gamma_bar needs x1 < x2 and positive radii");
  Contour c;
  c.pieces.push_back(Arc{cplx(x2, 0.0), r2, -pi / 2, pi / 2});
  c.pieces.push_back(Segment{cplx(x2, r2), cplx(x1, r1)});
  c.pieces.push_back(Arc{cplx(x1, 0.0), r1, pi / 2, 3 * pi / 2});
  c.pieces.push_back(Segment{cplx(x1, -r1), cplx(x2, -r2)});
  return c;
}

Contour mb_line(double delta, double T) {
  if (!(T > 0.0)) throw DomainError("mb_line needs T > 0");
  return Contour{{Segment{cplx(delta, -T), cplx(delta, T)}}};
}

Contour airy_wedge_in(cplx vertex, double length) {
  Contour c;
  c.pieces.push_back(Ray{vertex, -pi / 3, length, -1});
  c.pieces.push_back(Ray{vertex, pi / 3, length, 1});
  return c;
}

Contour airy_wedge_out(cplx vertex, double length) {
  Contour c;
  c.pieces.push_back(Ray{vertex, -2 * pi / 3, length, -1});
  c.pieces.push_back(Ray{vertex, 2 * pi / 3, length, 1});
  return c;
}

double min_distance(const Contour& c, cplx point, const QuadratureRule& rule) {
  double d = INFINITY;
  for (const Node& n : discretize(c, rule)) d = std::min(d, std::abs(n.z - point));
  return d;
}

}  // namespace asep
