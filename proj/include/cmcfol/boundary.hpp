// Ideal boundary curves: Fourier radial profiles about a star center,
// sampling, star-shapedness, the dilation family and the collar ring.
#pragma once

#include "cmcfol/geometry.hpp"

#include <vector>

namespace cmcfol {

/// Closed ideal curve stored as a radial profile rho(theta) (spherical
/// radius about `center`, azimuth in the frame of `center`).
///
/// rho0(theta) = a0 + sum_k a[k-1] cos(k theta) + b[k-1] sin(k theta). The
/// dilation parameter t scales the planar image in the star frame, so the
/// effective profile is rho = 2 atan(t tan(rho0 / 2)).
class IdealCurve {
 public:
  IdealCurve() = default;
  IdealCurve(const IdealPoint& center, double a0, std::vector<double> a, std::vector<double> b,
             bool center_positive = true, double dilation = 1.0);

  static IdealCurve round(const IdealPoint& center, double rho, bool center_positive = true);

  const IdealPoint& center() const { return center_; }
  const Frame& frame() const { return frame_; }
  bool center_positive() const { return center_positive_; }
  double dilation() const { return t_; }
  int order() const { return static_cast<int>(a_.size()); }
  double a0() const { return a0_; }
  const std::vector<double>& cos_coeffs() const { return a_; }
  const std::vector<double>& sin_coeffs() const { return b_; }

  double rho(double theta) const;
  /// Radius of the planar image in the star frame (center -> origin).
  double planar_radius(double theta) const;
  double planar_radius_derivative(double theta) const;
  Vec2 planar_point(double theta) const;
  IdealPoint point(double theta) const;
  /// An ideal point inside Omega+.
  IdealPoint positive_ref() const;
  /// Sign applied to H when converting to the star frame, where Omega+ is the
  /// bounded planar region.
  double orientation_sign() const { return center_positive_ ? 1.0 : -1.0; }

 private:
  double rho0(double theta) const;
  double rho0_derivative(double theta) const;

  IdealPoint center_;
  Frame frame_;
  double a0_ = 1.0;
  std::vector<double> a_, b_;
  bool center_positive_ = true;
  double t_ = 1.0;
};

/// m points equally spaced in theta. Requires m >= 4 and m >= 4K.
std::vector<IdealPoint> sample_curve(const IdealCurve& curve, int m);
SampledCurve sampled(const IdealCurve& curve, int m);

struct StarShapedness {
  bool star = false;
  double margin = 0.0;  // min planar radius
};

StarShapedness is_star_shaped(const IdealCurve& curve);
/// Planar closed polyline test: the polar angle about the origin must
/// increase strictly and wind exactly once.
StarShapedness is_star_shaped(const std::vector<Vec2>& polyline);

/// True when the closed planar polyline has no self-intersection.
bool polyline_is_simple(const std::vector<Vec2>& polyline);

IdealCurve dilate_curve(const IdealCurve& curve, double t);

/// Drift per unit height of the collar at local log-gradient g = r'/r.
double drift_rate(double H, double g);

struct CollarModel {
  double H = 0.0;
  double height = 0.0;
  std::vector<double> theta;
  std::vector<double> rate;  // signed, positive toward the unbounded planar side
};

CollarModel collar_model(const IdealCurve& curve, double H, double eps, int m);

/// Pinned boundary ring: m points at star-frame height eps lying on the exact
/// equidistant leaf of the osculating circle of the planar image.
std::vector<BallPoint> collar_ring(const IdealCurve& curve, double H, double eps, int m);
/// Star-frame planar radius of one collar point at azimuth theta.
double collar_radius(const IdealCurve& curve, double H, double eps, double theta);

}  // namespace cmcfol
