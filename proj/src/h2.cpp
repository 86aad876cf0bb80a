#include "cmcfol/h2.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cmcfol::h2 {

namespace {

constexpr double kPi = std::numbers::pi;
using Cx = std::complex<double>;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
Vec2 unit(double phi) { return {std::cos(phi), std::sin(phi)}; }
Vec2 rotate(const Vec2& v, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

Cx to_cx(const Vec2& v) { return {v.x(), v.y()}; }
Vec2 to_vec(const Cx& z) { return {z.real(), z.imag()}; }

template <class F>
double integrate(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 20, 1e-13);
}

}  // namespace

H2Arc h2_arc(const Vec2& p, const Vec2& q, double k) {
  if (!(std::abs(k) < 1.0)) throw std::invalid_argument("|k| < 1 required for an arc with ideal endpoints");
  if (std::abs(p.norm() - 1.0) > 1e-12 || std::abs(q.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("arc endpoints must be ideal points");
  }
  if ((p - q).norm() < 1e-12) throw std::invalid_argument("arc endpoints must differ");
  double beta = std::atan2(cross2(p, q), p.dot(q));
  if (beta <= 0.0) beta += 2.0 * kPi;
  H2Arc arc;
  arc.p = p;
  arc.q = q;
  arc.k = k;
  arc.half_angle = 0.5 * beta;
  arc.u = rotate(p, arc.half_angle);
  const double ca = std::cos(arc.half_angle);
  const double d = std::sqrt(1.0 - k * k) / std::sin(arc.half_angle);
  arc.a = k + d * ca;
  arc.b = d * arc.u;
  arc.c = 2.0 * d * ca - arc.a;
  return arc;
}

Vec2 H2Arc::point(double s) const {
  if (std::abs(a) < 1e-9) return p + s * (q - p);
  const Vec2 C = b / a;
  const double r = 1.0 / std::abs(a);
  const double pa = std::atan2((p - C).y(), (p - C).x());
  double sweep = std::atan2(cross2(p - C, q - C), (p - C).dot(q - C));
  // Pick the way round the carrier that stays inside the disk.
  if ((C + r * unit(pa + 0.5 * sweep)).norm() > 1.0) sweep -= std::copysign(2.0 * kPi, sweep);
  return C + r * unit(pa + s * sweep);
}

double h2_distance(const Vec2& x, const Vec2& y) {
  const double delta = 2.0 * (x - y).squaredNorm() / ((1.0 - x.squaredNorm()) * (1.0 - y.squaredNorm()));
  return std::log1p(delta + std::sqrt(delta * (2.0 + delta)));
}

double curvature_through(const Vec2& p, const Vec2& q, const Vec2& x) {
  Eigen::Matrix<double, 3, 4> m;
  for (int i = 0; i < 3; ++i) {
    const Vec2& z = i == 0 ? p : (i == 1 ? q : x);
    m.row(i) << z.squaredNorm(), -2.0 * z.x(), -2.0 * z.y(), 1.0;
  }
  const Eigen::Vector4d v = Eigen::FullPivLU<Eigen::Matrix<double, 3, 4>>(m).kernel().col(0);
  double a = v[0], c = v[3];
  Vec2 b(v[1], v[2]);
  const double s = 1.0 / std::sqrt(b.squaredNorm() - a * c);
  a *= s;
  b *= s;
  c *= s;
  const Vec2 u = h2_arc(p, q, 0.0).u;
  if (a * u.squaredNorm() - 2.0 * b.dot(u) + c > 0.0) {
    a = -a;
    c = -c;
  }
  return 0.5 * (a - c);
}

namespace {

// Intersections of two generalized circles F1 = F2 = 0.
std::vector<Vec2> carrier_intersections(const H2Arc& f, const H2Arc& g) {
  const Vec2 n = 2.0 * (g.a * f.b - f.a * g.b);
  const double h = g.a * f.c - f.a * g.c;
  const H2Arc& circ = std::abs(f.a) >= std::abs(g.a) ? f : g;
  const double nn = n.squaredNorm();
  if (nn == 0.0 || circ.a == 0.0) return {};
  const Vec2 C = circ.b / circ.a;
  const double r = 1.0 / std::abs(circ.a);
  const Vec2 x0 = C + (h - n.dot(C)) / nn * n;
  const double t2 = r * r - (x0 - C).squaredNorm();
  if (t2 < 0.0) return {};
  const Vec2 perp = Vec2(-n.y(), n.x()) / std::sqrt(nn);
  const double t = std::sqrt(t2);
  return {x0 + t * perp, x0 - t * perp};
}

Cx mobius_inv(const Cx& m, const Cx& w) { return (w + m) / (1.0 + std::conj(m) * w); }

}  // namespace

FoliationReport h2_foliation_check(const Vec2& p, const Vec2& q, const std::vector<double>& k_grid, double tol) {
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (!(std::abs(k_grid[i]) < 1.0)) throw std::invalid_argument("k grid must lie in (-1, 1)");
    if (i > 0 && !(k_grid[i] > k_grid[i - 1])) throw std::invalid_argument("k grid must be strictly increasing");
  }
  FoliationReport rep;
  std::vector<H2Arc> arcs;
  for (double k : k_grid) arcs.push_back(h2_arc(p, q, k));

  rep.disjoint = true;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    for (std::size_t j = i + 1; j < arcs.size(); ++j) {
      const auto pts = carrier_intersections(arcs[i], arcs[j]);
      if (pts.size() != 2) rep.disjoint = false;
      for (const auto& x : pts) {
        rep.max_intersection_offset = std::max(rep.max_intersection_offset, std::abs(x.norm() - 1.0));
      }
    }
  }
  if (rep.max_intersection_offset > tol) rep.disjoint = false;

  // Perpendiculars to the k = 0 geodesic at several offsets along it.
  const H2Arc geo = h2_arc(p, q, 0.0);
  const double cos_a = std::cos(geo.half_angle);
  const double s0 = std::abs(cos_a) < 1e-15 ? 0.0 : (1.0 - std::sin(geo.half_angle)) / cos_a;
  const Cx m = s0 * to_cx(geo.u);
  const Cx u = to_cx(geo.u);
  const Cx v = Cx(0, 1) * u;
  rep.monotone = true;
  for (double tau : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const Cx tv = std::tanh(0.5 * tau) * v;
    auto probe = [&](double s) {
      const Cx w = (s * u + tv) / (1.0 + std::conj(tv) * s * u);
      return to_vec(mobius_inv(m, w));
    };
    double prev = 2.0;
    for (const auto& arc : arcs) {
      double lo = -1.0 + 1e-9, hi = 1.0 - 1e-9;
      const double flo = arc.eval(probe(lo));
      if (!(flo > 0.0) || !(arc.eval(probe(hi)) < 0.0)) {
        rep.monotone = false;
        rep.detail = "probe does not bracket an arc";
        continue;
      }
      for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        (arc.eval(probe(mid)) > 0.0 ? lo : hi) = mid;
      }
      const double s = 0.5 * (lo + hi);
      const double dist = 2.0 * std::atanh(s);
      rep.max_distance_error = std::max(rep.max_distance_error, std::abs(dist + std::atanh(arc.k)));
      if (!(s < prev)) rep.monotone = false;
      prev = s;
    }
    ++rep.probes;
  }

  // Every interior point lies on a leaf with |k| < 1.
  rep.fills = true;
  int inside = 0, total = 0;
  for (int i = 1; i <= 24; ++i) {
    const double r = std::tanh(0.25 * i);
    for (int j = 0; j < 64; ++j) {
      const Vec2 x = r * unit(2.0 * kPi * (j + 0.5) / 64);
      const double k = curvature_through(p, q, x);
      ++total;
      if (!(std::abs(k) < 1.0)) rep.fills = false;
      if (!k_grid.empty() && k >= k_grid.front() && k <= k_grid.back()) ++inside;
    }
  }
  rep.grid_coverage = static_cast<double>(inside) / total;
  rep.pass = rep.disjoint && rep.monotone && rep.fills && rep.max_distance_error <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Piecewise-circular curves.

namespace {

struct ArcGeom {
  bool line = true;
  Vec2 a, b, C = Vec2::Zero();
  double rho = 0.0, phiA = 0.0, theta = 0.0;

  explicit ArcGeom(const ArcPiece& p) : a(p.a), b(p.b) {
    if (std::abs(p.bulge) < 1e-14) return;
    line = false;
    theta = 4.0 * std::atan(p.bulge);
    const Vec2 chord = b - a;
    const double cl = chord.norm();
    const Vec2 nl = Vec2(-chord.y(), chord.x()) / cl;
    C = 0.5 * (a + b) + nl * (0.5 * cl / std::tan(0.5 * theta));
    rho = (a - C).norm();
    phiA = std::atan2((a - C).y(), (a - C).x());
  }

  Vec2 point(double t) const { return line ? Vec2(a + t * (b - a)) : Vec2(C + rho * unit(phiA + theta * t)); }

  double param(const Vec2& x) const {
    if (line) return (x - a).dot(b - a) / (b - a).squaredNorm();
    double d = std::atan2((x - C).y(), (x - C).x()) - phiA;
    if (theta > 0) {
      d = std::fmod(d, 2.0 * kPi);
      if (d < 0) d += 2.0 * kPi;
      if (d > theta && 2.0 * kPi - d < 1e-9) d -= 2.0 * kPi;
    } else {
      d = std::fmod(d, 2.0 * kPi);
      if (d > 0) d -= 2.0 * kPi;
      if (d < theta && 2.0 * kPi + d < 1e-9) d += 2.0 * kPi;
    }
    return d / theta;
  }

  ArcPiece sub(double t0, double t1) const {
    return {point(t0), point(t1), line ? 0.0 : std::tan(0.25 * theta * (t1 - t0))};
  }
};

// Antiderivative of 1 / (alpha - beta cos psi), continuous where positive.
double inv_cos_antiderivative(double alpha, double beta, double psi) {
  if (beta < 1e-14) return psi / alpha;
  if (alpha > beta) {
    const double s = std::sqrt(alpha * alpha - beta * beta);
    const double qq = std::sqrt((alpha + beta) / (alpha - beta));
    return 2.0 / s * (std::atan(qq * std::tan(0.5 * psi)) + kPi * std::floor((psi + kPi) / (2.0 * kPi)));
  }
  const double A = std::sqrt(alpha + beta), B = std::sqrt(beta - alpha);
  const double sh = std::sin(0.5 * psi), ch = std::cos(0.5 * psi);
  return std::log(std::abs((A * sh - B * ch) / (A * sh + B * ch))) / (A * B);
}

}  // namespace

ArcPiece geodesic_segment(const Vec2& a, const Vec2& b) {
  if (a.norm() >= 1.0 || b.norm() >= 1.0) throw std::invalid_argument("geodesic endpoints must be interior");
  const double scale = std::max(a.norm(), b.norm());
  if (std::abs(cross2(a, b)) <= 1e-14 * std::max(scale * scale, 1e-300)) return {a, b, 0.0};
  // Orthogonal circle through a, b and the inverse of the point farther from 0.
  const Vec2 far = a.norm() >= b.norm() ? a : b;
  const Vec2 c = far / far.squaredNorm();
  const Vec2 ab = b - a, ac = c - a;
  const double den = 2.0 * cross2(ab, ac);
  const Vec2 C = a + Vec2(ac.y() * ab.squaredNorm() - ab.y() * ac.squaredNorm(),
                          ab.x() * ac.squaredNorm() - ac.x() * ab.squaredNorm()) / den;
  double theta = std::atan2(cross2(a - C, b - C), (a - C).dot(b - C));
  const double rho = (a - C).norm();
  const double pa = std::atan2((a - C).y(), (a - C).x());
  if ((C + rho * unit(pa + 0.5 * theta)).norm() >= 1.0) theta -= std::copysign(2.0 * kPi, theta);
  return {a, b, std::tan(0.25 * theta)};
}

Curve arc_chain(const std::vector<Vec2>& nodes, const std::vector<double>& bulges) {
  if (nodes.size() < 2 || bulges.size() + 1 != nodes.size()) {
    throw std::invalid_argument("arc chain needs n nodes and n - 1 bulges");
  }
  Curve c;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i].norm() >= 1.0) throw std::invalid_argument("curve nodes must be interior points");
    c.push_back({nodes[i], nodes[i + 1], bulges[i]});
  }
  if (nodes.back().norm() >= 1.0) throw std::invalid_argument("curve nodes must be interior points");
  return c;
}

double length(const ArcPiece& piece) {
  const ArcGeom g(piece);
  if (g.line) {
    const Vec2 d = g.b - g.a;
    const double dl = d.norm();
    if (dl == 0.0) return 0.0;
    const double s0 = g.a.dot(d) / dl;
    const double h2 = g.a.squaredNorm() - s0 * s0;
    const double w = std::sqrt(1.0 - h2);
    return 2.0 / w * (std::atanh((s0 + dl) / w) - std::atanh(s0 / w));
  }
  const double alpha = 1.0 - g.C.squaredNorm() - g.rho * g.rho;
  const double beta = 2.0 * g.rho * g.C.norm();
  const double phiC = std::atan2(g.C.y(), g.C.x());
  const double psi0 = g.phiA - phiC;
  if (std::abs(alpha - beta) < 1e-12) {
    return integrate([&](double t) { return 2.0 / (1.0 - g.point(t).squaredNorm()); }, 0.0, 1.0) * g.rho *
           std::abs(g.theta);
  }
  return 2.0 * g.rho *
         std::abs(inv_cos_antiderivative(alpha, beta, psi0 + g.theta) - inv_cos_antiderivative(alpha, beta, psi0));
}

double length(const Curve& c) {
  double s = 0.0;
  for (const auto& p : c) s += length(p);
  return s;
}

double right_flux(const ArcPiece& piece) {
  const ArcGeom g(piece);
  if (g.line) {
    const Vec2 d = g.b - g.a;
    const Vec2 nr(d.y(), -d.x());
    return integrate([&](double t) {
      const Vec2 x = g.point(t);
      return 2.0 * x.dot(nr) / (1.0 - x.squaredNorm());
    }, 0.0, 1.0);
  }
  return integrate([&](double t) {
    const double phi = g.phiA + g.theta * t;
    const Vec2 e = unit(phi);
    const Vec2 x = g.C + g.rho * e;
    return g.theta * g.rho * 2.0 * x.dot(e) / (1.0 - x.squaredNorm());
  }, 0.0, 1.0);
}

double right_flux(const Curve& c) {
  double s = 0.0;
  for (const auto& p : c) s += right_flux(p);
  return s;
}

double area_right(const Curve& c) {
  if (c.empty()) return 0.0;
  return right_flux(geodesic_segment(c.front().a, c.back().b)) - right_flux(c);
}

double energy(const Curve& c, double k) { return length(c) + 2.0 * k * area_right(c); }

namespace {

double euclid_signed_area(const Curve& loop) {
  double s = 0.0;
  for (const auto& p : loop) {
    const ArcGeom g(p);
    s += 0.5 * cross2(p.a, p.b);
    if (!g.line) {
      const double t = std::abs(g.theta);
      s += std::copysign(0.5 * g.rho * g.rho * (t - std::sin(t)), g.theta);
    }
  }
  return s;
}

std::vector<Vec2> piece_intersections(const ArcGeom& f, const ArcGeom& g) {
  if (f.line && g.line) {
    const Vec2 d1 = f.b - f.a, d2 = g.b - g.a;
    const double den = cross2(d1, d2);
    if (den == 0.0) return {};
    const double t = cross2(g.a - f.a, d2) / den;
    return {f.a + t * d1};
  }
  if (f.line || g.line) {
    const ArcGeom& L = f.line ? f : g;
    const ArcGeom& A = f.line ? g : f;
    const Vec2 d = (L.b - L.a).normalized();
    const double proj = (A.C - L.a).dot(d);
    const Vec2 foot = L.a + proj * d;
    const double h2 = A.rho * A.rho - (foot - A.C).squaredNorm();
    if (h2 < 0) return {};
    const double h = std::sqrt(h2);
    return {foot + h * d, foot - h * d};
  }
  const Vec2 dc = g.C - f.C;
  const double dist = dc.norm();
  if (dist == 0.0 || dist > f.rho + g.rho || dist < std::abs(f.rho - g.rho)) return {};
  const double a = (f.rho * f.rho - g.rho * g.rho + dist * dist) / (2.0 * dist);
  const double h = std::sqrt(std::max(0.0, f.rho * f.rho - a * a));
  const Vec2 base = f.C + a * dc / dist;
  const Vec2 perp(-dc.y() / dist, dc.x() / dist);
  return {base + h * perp, base - h * perp};
}

struct Crossing {
  double s1, s2;  // chain parameters: piece index + local parameter
  Vec2 x;
};

Curve subcurve(const Curve& c, double s0, double s1) {
  Curve out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double t0 = std::max(s0 - static_cast<double>(i), 0.0);
    const double t1 = std::min(s1 - static_cast<double>(i), 1.0);
    if (t1 - t0 > 1e-15) out.push_back(ArcGeom(c[i]).sub(t0, t1));
  }
  return out;
}

Curve reversed(const Curve& c) {
  Curve r;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r.push_back({it->b, it->a, -it->bulge});
  return r;
}

}  // namespace

ExchangeDecomposition h2_exchange(const Curve& c1, double k1, const Curve& c2, double k2) {
  if (!(k1 < k2)) throw std::invalid_argument("h2_exchange requires k1 < k2");
  if (c1.empty() || c2.empty()) throw std::invalid_argument("empty curve");
  const Vec2 P = c1.front().a, Q = c1.back().b;
  if ((c2.front().a - P).norm() > 1e-12 || (c2.back().b - Q).norm() > 1e-12) {
    throw std::invalid_argument("curves must share both endpoints");
  }

  std::vector<Crossing> xs;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    const ArcGeom f(c1[i]);
    for (std::size_t j = 0; j < c2.size(); ++j) {
      const ArcGeom g(c2[j]);
      for (const Vec2& x : piece_intersections(f, g)) {
        if ((x - P).norm() < 1e-10 || (x - Q).norm() < 1e-10) continue;
        const double t1 = f.param(x), t2 = g.param(x);
        if (t1 < -1e-12 || t1 > 1 + 1e-12 || t2 < -1e-12 || t2 > 1 + 1e-12) continue;
        xs.push_back({i + std::clamp(t1, 0.0, 1.0), j + std::clamp(t2, 0.0, 1.0), x});
      }
    }
  }
  std::sort(xs.begin(), xs.end(), [](const Crossing& a, const Crossing& b) { return a.s1 < b.s1; });
  std::vector<Crossing> uniq;
  for (const auto& c : xs) {
    if (uniq.empty() || (c.x - uniq.back().x).norm() > 1e-10) uniq.push_back(c);
  }
  for (std::size_t i = 1; i < uniq.size(); ++i) {
    if (!(uniq[i].s2 > uniq[i - 1].s2)) throw std::invalid_argument("curves cross in inconsistent order");
  }

  std::vector<double> b1{0.0}, b2{0.0};
  for (const auto& c : uniq) {
    b1.push_back(c.s1);
    b2.push_back(c.s2);
  }
  b1.push_back(static_cast<double>(c1.size()));
  b2.push_back(static_cast<double>(c2.size()));

  ExchangeDecomposition out;
  Curve left, right;  // c1' and c2'
  for (std::size_t k = 0; k + 1 < b1.size(); ++k) {
    const Curve p1 = subcurve(c1, b1[k], b1[k + 1]);
    const Curve p2 = subcurve(c2, b2[k], b2[k + 1]);
    Curve loop = p1;
    for (const auto& piece : reversed(p2)) loop.push_back(piece);
    const bool c2_left = euclid_signed_area(loop) > 0.0;
    if (c2_left) {
      out.T1 += length(p1);
      out.T2 += length(p2);
      out.Q += right_flux(p1) - right_flux(p2);
      ++out.lenses;
    }
    const Curve& up = c2_left ? p2 : p1;
    const Curve& down = c2_left ? p1 : p2;
    left.insert(left.end(), up.begin(), up.end());
    right.insert(right.end(), down.begin(), down.end());
  }
  out.I1 = energy(c1, k1);
  out.I1_swapped = energy(left, k1);
  out.I2 = energy(c2, k2);
  out.I2_swapped = energy(right, k2);
  out.reduction1 = out.I1 - out.I1_swapped;
  out.reduction2 = out.I2 - out.I2_swapped;
  out.consistency_error = std::abs(out.reduction1 + out.reduction2 - 2.0 * (k2 - k1) * out.Q);
  out.infeasible = out.Q > 1e-14 && std::max(out.reduction1, out.reduction2) > 0.0;
  return out;
}

std::pair<Curve, Curve> crossing_pair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double phi = kPi * U(rng);
  auto place = [&](double x, double y) { return rotate(Vec2(x, y), phi); };
  const Vec2 P = place(-0.6, 0.0), Q = place(0.6, 0.0);
  const Vec2 M1 = place(-0.25 + 0.05 * U(rng), 0.3 + 0.08 * U(rng));
  const Vec2 M2 = place(0.25 + 0.05 * U(rng), 0.3 + 0.08 * U(rng));
  Curve c1 = arc_chain({P, M1, Q}, {0.12 * U(rng), 0.12 * U(rng)});
  Curve c2 = arc_chain({P, M2, Q}, {0.12 * U(rng), 0.12 * U(rng)});
  return {std::move(c1), std::move(c2)};
}

}  // namespace cmcfol::h2
