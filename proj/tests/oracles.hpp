// Independent reference computations used only by the tests.
#pragma once

#include "cmcfol/geometry.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using cmcfol::Vec2;
using cmcfol::Vec3;

// Hyperbolic mean curvature of a Euclidean sphere (center C, radius R) at a
// point x of it, toward the unit normal n, from the conformal change rule
// H = (H_e - d_n log lambda) / lambda with lambda = 2 / (1 - |x|^2).
inline double sphere_mean_curvature(const Vec3& C, double R, const Vec3& x, const Vec3& n) {
  const double lambda = 2.0 / (1.0 - x.squaredNorm());
  const Vec3 inward = (C - x) / R;
  const double He = inward.dot(n) / R;  // +1/R when n points at the center
  const double dlog = 2.0 * x.dot(n) / (1.0 - x.squaredNorm());
  return (He - dlog) / lambda;
}

// Same for a plane with unit normal n through x (H_e = 0).
inline double plane_mean_curvature(const Vec3& x, const Vec3& n) {
  const double lambda = 2.0 / (1.0 - x.squaredNorm());
  return -(2.0 * x.dot(n) / (1.0 - x.squaredNorm())) / lambda;
}

// Ball distance by the cross-ratio-free formula, written out here separately.
inline double ball_distance(const Vec3& p, const Vec3& q) {
  const double num = 2.0 * (p - q).squaredNorm();
  const double den = (1.0 - p.squaredNorm()) * (1.0 - q.squaredNorm());
  return std::acosh(1.0 + num / den);
}

// Length of the straight segment from 0 to x under the ball metric, by
// composite Simpson quadrature.
inline double radial_length(const Vec3& x, int n = 2000) {
  const double r = x.norm();
  double s = 0.0;
  const double h = r / n;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * 2.0 / (1.0 - t * t);
  }
  return s * h / 3.0;
}

// Proper segment intersection in the plane (shared endpoints excluded).
inline bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q - p).x() * (r - p).y() - (q - p).y() * (r - p).x();
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0.0 && o3 * o4 < 0.0;
}

inline bool closed_polyline_simple(const std::vector<Vec2>& p) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

// Number of times the ray from the origin at angle phi crosses the closed
// polyline.
inline int ray_hits(const std::vector<Vec2>& p, double phi) {
  const Vec2 d(std::cos(phi), std::sin(phi));
  int hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % p.size()];
    const Vec2 e = b - a;
    const double den = d.x() * (-e.y()) - d.y() * (-e.x());
    if (std::abs(den) < 1e-15) continue;
    const double t = (a.x() * (-e.y()) - a.y() * (-e.x())) / den;
    const double s = (d.x() * a.y() - d.y() * a.x()) / den;
    if (t > 0.0 && s >= 0.0 && s < 1.0) ++hits;
  }
  return hits;
}

// Circle through three points: returns the signed curvature (positive when
// the points turn counterclockwise).
inline double three_point_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double cross = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  return 2.0 * cross / ((b - a).norm() * (c - b).norm() * (c - a).norm());
}

inline Vec3 random_ball_point(std::mt19937_64& rng, double rmax) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec3 d(g(rng), g(rng), g(rng));
  return d.normalized() * rmax * std::cbrt(u(rng));
}

}  // namespace oracle
