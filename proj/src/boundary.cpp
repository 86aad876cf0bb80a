#include "cmcfol/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cmcfol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

bool segments_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  auto on_seg = [](const Vec2& a, const Vec2& b, const Vec2& p) {
    return p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
           p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
  };
  return (d1 == 0 && on_seg(q1, q2, p1)) || (d2 == 0 && on_seg(q1, q2, p2)) ||
         (d3 == 0 && on_seg(p1, p2, q1)) || (d4 == 0 && on_seg(p1, p2, q2));
}

std::vector<Vec2> planar_polyline(const IdealCurve& curve, int m) {
  std::vector<Vec2> pts(m);
  for (int i = 0; i < m; ++i) pts[i] = curve.planar_point(kTwoPi * i / m);
  return pts;
}

}  // namespace

IdealCurve::IdealCurve(const IdealPoint& center, double a0, std::vector<double> a, std::vector<double> b,
                       bool center_positive, double dilation)
    : center_(center),
      frame_(center),
      a0_(a0),
      a_(std::move(a)),
      b_(std::move(b)),
      center_positive_(center_positive),
      t_(dilation) {
  if (a_.size() != b_.size()) throw std::invalid_argument("curve needs as many sine as cosine coefficients");
  if (!(t_ > 0.0)) throw std::invalid_argument("curve dilation must be positive");
  const int n = 256 * (order() + 1);
  for (int i = 0; i < n; ++i) {
    const double r = rho0(kTwoPi * i / n);
    if (!(r > 0.0 && r < std::numbers::pi)) {
      throw std::invalid_argument("curve profile leaves (0, pi) at theta = " + std::to_string(kTwoPi * i / n));
    }
  }
}

IdealCurve IdealCurve::round(const IdealPoint& center, double rho, bool center_positive) {
  return IdealCurve(center, rho, {}, {}, center_positive);
}

double IdealCurve::rho0(double theta) const {
  double r = a0_;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double kt = static_cast<double>(k + 1) * theta;
    r += a_[k] * std::cos(kt) + b_[k] * std::sin(kt);
  }
  return r;
}

double IdealCurve::rho0_derivative(double theta) const {
  double d = 0.0;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double kk = static_cast<double>(k + 1);
    d += kk * (-a_[k] * std::sin(kk * theta) + b_[k] * std::cos(kk * theta));
  }
  return d;
}

double IdealCurve::planar_radius(double theta) const { return t_ * std::tan(0.5 * rho0(theta)); }

double IdealCurve::planar_radius_derivative(double theta) const {
  const double c = std::cos(0.5 * rho0(theta));
  return t_ * 0.5 / (c * c) * rho0_derivative(theta);
}

double IdealCurve::rho(double theta) const { return 2.0 * std::atan(planar_radius(theta)); }

Vec2 IdealCurve::planar_point(double theta) const {
  return planar_radius(theta) * Vec2(std::cos(theta), std::sin(theta));
}

IdealPoint IdealCurve::point(double theta) const {
  return IdealPoint(frame_.ideal_direction(rho(theta), theta).normalized());
}

IdealPoint IdealCurve::positive_ref() const {
  return center_positive_ ? center_ : IdealPoint(-center_.dir());
}

std::vector<IdealPoint> sample_curve(const IdealCurve& curve, int m) {
  if (m < 4) throw std::invalid_argument("sample_curve needs m >= 4");
  if (m < 4 * curve.order()) {
    throw std::invalid_argument("undersampled curve: m = " + std::to_string(m) + " < 4K = " +
                                std::to_string(4 * curve.order()));
  }
  if (!polyline_is_simple(planar_polyline(curve, m))) throw std::invalid_argument("curve polyline self-intersects");
  std::vector<IdealPoint> pts;
  pts.reserve(m);
  for (int i = 0; i < m; ++i) pts.push_back(curve.point(kTwoPi * i / m));
  return pts;
}

SampledCurve sampled(const IdealCurve& curve, int m) { return {sample_curve(curve, m), curve.positive_ref()}; }

bool polyline_is_simple(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  std::vector<Eigen::AlignedBox2d> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    boxes[i].extend(poly[i]);
    boxes[i].extend(poly[(i + 1) % n]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (!boxes[i].intersects(boxes[j])) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

StarShapedness is_star_shaped(const std::vector<Vec2>& poly) {
  StarShapedness out;
  if (poly.size() < 3) return out;
  double margin = std::numeric_limits<double>::infinity();
  double total = 0.0;
  int sign = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    margin = std::min(margin, p.norm());
    if (p.norm() == 0.0) return out;
    const double d = std::atan2(p.x() * q.y() - p.y() * q.x(), p.dot(q));
    const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) return out;
    sign = s;
    total += d;
  }
  out.margin = margin;
  out.star = std::abs(std::abs(total) - kTwoPi) < 1e-6;
  return out;
}

StarShapedness is_star_shaped(const IdealCurve& curve) {
  return is_star_shaped(planar_polyline(curve, std::max(4096, 64 * curve.order())));
}

IdealCurve dilate_curve(const IdealCurve& curve, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("dilation parameter must be positive");
  return IdealCurve(curve.center(), curve.a0(), curve.cos_coeffs(), curve.sin_coeffs(), curve.center_positive(),
                    curve.dilation() * t);
}

double drift_rate(double H, double g) {
  if (!(std::abs(H) < 1.0)) throw std::invalid_argument("drift rate needs |H| < 1");
  return H / std::sqrt(1.0 - H * H) * std::sqrt(1.0 + g * g);
}

namespace {

void check_collar_args(double H, double eps) {
  if (!(std::abs(H) < 1.0)) throw std::invalid_argument("collar needs |H| < 1");
  if (!(eps > 0.0 && eps <= 0.05)) throw std::invalid_argument("collar height must lie in (0, 0.05]");
}

}  // namespace

CollarModel collar_model(const IdealCurve& curve, double H, double eps, int m) {
  check_collar_args(H, eps);
  CollarModel model{H, eps, {}, {}};
  for (int i = 0; i < m; ++i) {
    const double th = kTwoPi * i / m;
    model.theta.push_back(th);
    const double g = curve.planar_radius_derivative(th) / curve.planar_radius(th);
    model.rate.push_back(drift_rate(curve.orientation_sign() * H, g));
  }
  return model;
}

double collar_radius(const IdealCurve& curve, double H, double eps, double theta) {
  check_collar_args(H, eps);
  const double h_eff = curve.orientation_sign() * H;
  const double w = std::sqrt(1.0 - H * H);
  const double delta = 1e-2;
  const Vec2 p0 = curve.planar_point(theta);
  const Vec2 pm = curve.planar_point(theta - delta);
  const Vec2 pp = curve.planar_point(theta + delta);
  const Vec2 u(std::cos(theta), std::sin(theta));
  const Vec2 tangent = pp - pm;
  const Vec2 n_out = Vec2(tangent.y(), -tangent.x()).normalized();
  const double r = curve.planar_radius(theta);

  // Circumcenter of the three samples.
  const Vec2 a = pm - p0, b = pp - p0;
  const double den = 2.0 * (a.x() * b.y() - a.y() * b.x());
  const double scale = a.norm() * b.norm() * (a - b).norm();
  if (std::abs(den) < 1e-10 * scale / std::max(r, 1e-12)) {
    // Locally straight: the leaf is a tilted plane.
    const double k = h_eff / w;
    return (p0.dot(n_out) + eps * k) / u.dot(n_out);
  }
  const Vec2 cc = p0 + Vec2(b.y() * a.squaredNorm() - a.y() * b.squaredNorm(),
                            a.x() * b.squaredNorm() - b.x() * a.squaredNorm()) / den;
  const double r0 = (cc - p0).norm();
  const bool disk_positive = (cc - p0).dot(n_out) < 0.0;
  const double h_disk = disk_positive ? h_eff : -h_eff;
  const double zc = h_disk * r0 / w;
  const double rs = r0 / w;
  const double rho_h2 = rs * rs - (eps - zc) * (eps - zc);
  const double uc = u.dot(cc);
  const double disc = uc * uc - cc.squaredNorm() + rho_h2;
  if (!(rho_h2 > 0.0 && disc >= 0.0)) {
    throw std::invalid_argument("collar height too large for the local curvature of the curve");
  }
  const double s1 = uc + std::sqrt(disc), s2 = uc - std::sqrt(disc);
  return std::abs(s1 - r) < std::abs(s2 - r) ? s1 : s2;
}

std::vector<BallPoint> collar_ring(const IdealCurve& curve, double H, double eps, int m) {
  check_collar_args(H, eps);
  if (m < 3) throw std::invalid_argument("collar ring needs at least 3 points");
  std::vector<BallPoint> ring;
  ring.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double th = kTwoPi * i / m;
    const double s = collar_radius(curve, H, eps, th);
    const Vec3 x = curve.frame().from_half(Vec3(s * std::cos(th), s * std::sin(th), eps));
    if (x.norm() > 1.0 - 0.25 * eps) {
      throw std::invalid_argument("collar point violates |p| <= 1 - eps/4; the curve reaches too far from its center");
    }
    ring.emplace_back(x);
  }
  return ring;
}

}  // namespace cmcfol
