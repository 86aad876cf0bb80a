#include "cmcfol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cmcfol {

namespace {

const Vec3 kNorth(0, 0, 1);

void check_inside(const Vec3& x) {
  if (!(x.norm() < 1.0 - kIdealGuard)) {
    throw std::invalid_argument("ball point too close to the ideal boundary (|p| = " +
                                std::to_string(x.norm()) + ")");
  }
}

double frac(double v) { return v - std::floor(v); }

// Great-circle arcs a->b and c->d (both shorter than pi) cross.
bool arcs_cross(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 n1 = a.cross(b);
  const Vec3 n2 = c.cross(d);
  const double s1 = n1.dot(c), s2 = n1.dot(d);
  const double s3 = n2.dot(a), s4 = n2.dot(b);
  if ((s1 > 0) == (s2 > 0) || (s3 > 0) == (s4 > 0)) return false;
  Vec3 x = n1.cross(n2);
  const double xn = x.norm();
  if (xn == 0.0) return false;
  x /= xn;
  if (x.dot(a + b) < 0) x = -x;
  return x.dot(c + d) > 0;
}

int count_crossings(const std::vector<IdealPoint>& poly, const Vec3& from, const Vec3& to) {
  int count = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (arcs_cross(from, to, poly[i].dir(), poly[(i + 1) % n].dir())) ++count;
  }
  return count;
}

}  // namespace

BallPoint::BallPoint(const Vec3& x) : x_(x) { check_inside(x); }

HalfSpacePoint::HalfSpacePoint(double x1, double x2, double h) : v_(x1, x2, h) {
  if (!(h > 0.0)) throw std::invalid_argument("half-space point needs height > 0");
}

IdealPoint::IdealPoint(const Vec3& dir) : d_(dir) {
  if (std::abs(dir.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("ideal point must be a unit vector");
  }
}

IdealCircle::IdealCircle(const Vec3& axis_, double angle_) : axis(axis_), angle(angle_) {
  if (std::abs(axis.norm() - 1.0) > 1e-12) throw std::invalid_argument("ideal circle axis must be unit");
  if (!(angle > 0.0 && angle < std::numbers::pi)) {
    throw std::invalid_argument("ideal circle angle must lie in (0, pi)");
  }
}

IdealCircle IdealCircle::flipped() const { return IdealCircle(-axis, std::numbers::pi - angle); }

double GeneralizedSphere::signed_distance(const Vec3& x) const {
  return -eval(x) / (1.0 + (a * x - b).norm());
}

Vec3 GeneralizedSphere::positive_normal(const Vec3& x) const { return -(a * x - b).normalized(); }

GeneralizedSphere GeneralizedSphere::normalized() const {
  const double q = b.squaredNorm() - a * c;
  if (!(q > 0)) throw std::invalid_argument("degenerate generalized sphere");
  const double s = 1.0 / std::sqrt(q);
  return {a * s, b * s, c * s};
}

double conformal_factor(const Vec3& p) {
  check_inside(p);
  return 2.0 / (1.0 - p.squaredNorm());
}

double conformal_factor(const BallPoint& p) { return conformal_factor(p.coords()); }

double hyp_distance(const Vec3& p, const Vec3& q) {
  check_inside(p);
  check_inside(q);
  const double delta = 2.0 * (p - q).squaredNorm() / ((1.0 - p.squaredNorm()) * (1.0 - q.squaredNorm()));
  return std::log1p(delta + std::sqrt(delta * (2.0 + delta)));
}

double hyp_distance(const BallPoint& p, const BallPoint& q) { return hyp_distance(p.coords(), q.coords()); }

double hyp_distance(const HalfSpacePoint& p, const HalfSpacePoint& q) {
  const double delta = (p.coords() - q.coords()).squaredNorm() / (2.0 * p.h() * q.h());
  return std::log1p(delta + std::sqrt(delta * (2.0 + delta)));
}

Vec3 cayley_to_half(const Vec3& x) {
  const Vec3 d = x - kNorth;
  const double d2 = d.squaredNorm();
  if (d2 == 0.0) throw std::invalid_argument("the north pole maps to infinity");
  const Vec3 y = kNorth + 2.0 * d / d2;
  return {y.x(), y.y(), -y.z()};
}

Vec3 cayley_to_ball(const Vec3& h) {
  const Vec3 y(h.x(), h.y(), -h.z());
  const Vec3 d = y - kNorth;
  const double d2 = d.squaredNorm();
  if (d2 == 0.0) throw std::invalid_argument("point maps to infinity");
  return kNorth + 2.0 * d / d2;
}

HalfSpacePoint to_half_space(const BallPoint& p) {
  const Vec3 y = cayley_to_half(p.coords());
  return {y.x(), y.y(), y.z()};
}

BallPoint to_ball(const HalfSpacePoint& p) { return BallPoint(cayley_to_ball(p.coords())); }

Vec2 ideal_to_plane(const IdealPoint& p) {
  const Vec3& x = p.dir();
  if (1.0 - x.z() < 1e-15) throw std::invalid_argument("ideal point maps to infinity");
  return Vec2(x.x(), x.y()) / (1.0 - x.z());
}

IdealPoint plane_to_ideal(const Vec2& q) {
  const Vec3 x = cayley_to_ball(Vec3(q.x(), q.y(), 0.0));
  return IdealPoint(x.normalized());
}

Frame::Frame(const IdealPoint& center) : c_(center.dir()) {
  const Vec3 e3 = -c_;
  Vec3 helper = std::abs(e3.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  e1_ = (helper - helper.dot(e3) * e3).normalized();
  e2_ = e3.cross(e1_);
}

Vec3 Frame::to_local(const Vec3& x) const { return {x.dot(e1_), x.dot(e2_), -x.dot(c_)}; }

Vec3 Frame::to_global(const Vec3& x) const { return x.x() * e1_ + x.y() * e2_ - x.z() * c_; }

Vec3 Frame::ideal_direction(double rho, double theta) const {
  return std::cos(rho) * c_ + std::sin(rho) * (std::cos(theta) * e1_ + std::sin(theta) * e2_);
}

Vec3 mobius_translate(const Vec3& a, const Vec3& x) {
  const double a2 = a.squaredNorm();
  const Vec3 d = x - a;
  const double den = 1.0 - 2.0 * a.dot(x) + a2 * x.squaredNorm();
  return ((1.0 - a2) * d - d.squaredNorm() * a) / den;
}

DilationIsometry::DilationIsometry(double t) : t_(t) {
  if (!(t > 0.0)) throw std::invalid_argument("dilation parameter must be positive");
}

HalfSpacePoint apply_dilation(const DilationIsometry& phi, const HalfSpacePoint& p) {
  return {phi.t() * p.x1(), phi.t() * p.x2(), phi.t() * p.h()};
}

CanonicalLeaf equidistant_leaf(const IdealCircle& circle, double H, CapSide positive) {
  if (!(std::abs(H) < 1.0)) {
    throw std::invalid_argument("no equidistant leaf with |H| >= 1; horospheres are the |H| = 1 barrier case");
  }
  const IdealCircle c = positive == CapSide::Inside ? circle : circle.flipped();
  const double ca = std::cos(c.angle);
  const double d = std::sqrt(1.0 - H * H) / std::sin(c.angle);
  CanonicalLeaf leaf;
  leaf.kind = H == 0.0 ? LeafKind::GeodesicPlane : LeafKind::Equidistant;
  leaf.carrier.a = H + d * ca;
  leaf.carrier.b = d * c.axis;
  leaf.carrier.c = 2.0 * d * ca - leaf.carrier.a;
  leaf.mean_curvature = H;
  leaf.circle = c;
  return leaf;
}

CanonicalLeaf geodesic_plane(const IdealCircle& circle, CapSide positive) {
  return equidistant_leaf(circle, 0.0, positive);
}

namespace {

GeneralizedSphere inward_sphere(const Vec3& m, double r) {
  return {1.0 / r, m / r, (m.squaredNorm() - r * r) / r};
}

}  // namespace

CanonicalLeaf horosphere(const IdealPoint& at, double euclidean_radius, bool inward) {
  if (!(euclidean_radius > 0.0 && euclidean_radius < 1.0)) {
    throw std::invalid_argument("horosphere radius must lie in (0,1)");
  }
  CanonicalLeaf leaf;
  leaf.kind = LeafKind::Horosphere;
  leaf.carrier = inward_sphere((1.0 - euclidean_radius) * at.dir(), euclidean_radius);
  if (!inward) leaf.carrier = leaf.carrier.reversed();
  leaf.mean_curvature = inward ? 1.0 : -1.0;
  return leaf;
}

CanonicalLeaf geodesic_sphere(const BallPoint& center, double hyperbolic_radius, bool inward) {
  if (!(hyperbolic_radius > 0.0)) throw std::invalid_argument("geodesic sphere radius must be positive");
  const Vec3& p = center.coords();
  const double pn = p.norm();
  const Vec3 u = pn > 0.0 ? Vec3(p / pn) : Vec3(0, 0, 1);
  const double dp = 2.0 * std::atanh(pn);
  const double r_far = std::tanh(0.5 * (dp + hyperbolic_radius));
  const double r_near = std::tanh(0.5 * (dp - hyperbolic_radius));
  CanonicalLeaf leaf;
  leaf.kind = LeafKind::GeodesicSphere;
  leaf.carrier = inward_sphere(0.5 * (r_far + r_near) * u, 0.5 * (r_far - r_near));
  if (!inward) leaf.carrier = leaf.carrier.reversed();
  const double h = 1.0 / std::tanh(hyperbolic_radius);
  leaf.mean_curvature = inward ? h : -h;
  return leaf;
}

double mean_curvature_of(const CanonicalLeaf& leaf) {
  switch (leaf.kind) {
    case LeafKind::GeodesicPlane:
      return 0.0;
    case LeafKind::Horosphere:
      return leaf.carrier.mean_curvature() > 0 ? 1.0 : -1.0;
    default:
      return leaf.carrier.mean_curvature();
  }
}

Side side_of(const CanonicalLeaf& leaf, const BallPoint& p, double tol) {
  const double sd = leaf.carrier.signed_distance(p.coords());
  if (std::abs(sd) <= tol) return Side::On;
  return sd > 0 ? Side::Positive : Side::Negative;
}

double signed_hyp_distance(const CanonicalLeaf& leaf, const Vec3& p) {
  if (leaf.kind != LeafKind::GeodesicPlane && leaf.kind != LeafKind::Equidistant) {
    throw std::invalid_argument("signed distance needs a plane or equidistant leaf");
  }
  check_inside(p);
  const GeneralizedSphere plane = geodesic_plane(leaf.circle).carrier;
  const double s = std::asinh(-plane.eval(p) / (1.0 - p.squaredNorm()));
  return s + std::atanh(leaf.mean_curvature);
}

bool in_positive_region(const SampledCurve& curve, const Vec3& u) {
  const Vec3& ref = curve.positive_ref.dir();
  int crossings = 0;
  if (ref.dot(u) < -0.5) {
    // Route through a waypoint perpendicular to ref so both arcs are short.
    Vec3 w = ref.cross(u);
    if (w.norm() < 1e-9) w = ref.unitOrthogonal();
    w.normalize();
    crossings = count_crossings(curve.samples, ref, w) + count_crossings(curve.samples, w, u);
  } else {
    crossings = count_crossings(curve.samples, ref, u);
  }
  return crossings % 2 == 0;
}

Vec3 spiral_direction(const Frame& frame, int k) {
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - 2.0 * frac(k * std::numbers::sqrt2);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = k * golden_angle;
  return z * frame.center() + s * (std::cos(phi) * frame.e1() + std::sin(phi) * frame.e2());
}

ShiftedHull::ShiftedHull(const SampledCurve& curve, double H, int budget) : H_(H) {
  if (!(std::abs(H) < 1.0)) throw std::invalid_argument("shifted hull needs |H| < 1");
  if (curve.samples.size() < 8) throw std::invalid_argument("shifted hull needs at least 8 curve samples");
  if (budget < 1) throw std::invalid_argument("shifted hull budget must be >= 1");
  const Frame frame(curve.positive_ref);
  const double shift = std::atanh(H);
  for (int k = 0; k < budget; ++k) {
    const Vec3 u = spiral_direction(frame, k);
    double m = -1.0;
    for (const auto& q : curve.samples) m = std::max(m, q.dir().dot(u));
    if (m > 1.0 - 1e-9) continue;
    const IdealCircle circle(u, std::acos(std::max(-1.0, m)));
    // The empty cap around u faces Omega+ or Omega-; the leaf is co-oriented
    // toward the side facing Omega+ and the supporting side contains the curve.
    if (in_positive_region(curve, u)) {
      halfspaces_.push_back({geodesic_plane(circle).carrier.reversed(), shift});
    } else {
      halfspaces_.push_back({geodesic_plane(circle.flipped()).carrier, -shift});
    }
  }
  if (halfspaces_.empty()) {
    throw std::invalid_argument("no supporting circle found; the sampled curve is degenerate");
  }
}

double ShiftedHull::margin(const Vec3& p) const {
  const double denom = 1.0 - p.squaredNorm();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& hs : halfspaces_) {
    best = std::min(best, std::asinh(-hs.plane.eval(p) / denom) - hs.shift);
  }
  return best;
}

ShiftedHalfspace make_shifted_halfspace(const IdealCircle& circle, double H, CapSide side) {
  return {circle, H, side, equidistant_leaf(circle, H, CapSide::Inside)};
}

double shifted_hull_margin(const SampledCurve& curve, double H, const BallPoint& p, int budget) {
  return ShiftedHull(curve, H, budget).margin(p.coords());
}

}  // namespace cmcfol
