// Hyperbolic 3-space substrate: Poincare ball and upper half-space models,
// canonical constant-mean-curvature leaves, side predicates and H-shifted
// convex hulls of ideal curves.
#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace cmcfol {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// Distance from the ideal sphere below which ball points are rejected.
inline constexpr double kIdealGuard = 1e-12;
/// Default absolute tolerance of geometric predicates (ball coordinates).
inline constexpr double kPredicateTol = 1e-9;

/// Point of the open unit ball. Construction rejects |x| >= 1 - 1e-12.
class BallPoint {
 public:
  BallPoint() = default;
  explicit BallPoint(const Vec3& x);
  BallPoint(double x, double y, double z) : BallPoint(Vec3(x, y, z)) {}

  const Vec3& coords() const { return x_; }
  double norm() const { return x_.norm(); }

 private:
  Vec3 x_ = Vec3::Zero();
};

/// Point of the upper half-space model: horizontal (x1, x2), height h > 0.
class HalfSpacePoint {
 public:
  HalfSpacePoint() = default;
  HalfSpacePoint(double x1, double x2, double h);

  double x1() const { return v_.x(); }
  double x2() const { return v_.y(); }
  double h() const { return v_.z(); }
  const Vec3& coords() const { return v_; }

 private:
  Vec3 v_ = Vec3(0, 0, 1);
};

/// Unit direction on the sphere at infinity.
class IdealPoint {
 public:
  IdealPoint() = default;
  explicit IdealPoint(const Vec3& dir);

  const Vec3& dir() const { return d_; }

 private:
  Vec3 d_ = Vec3(0, 0, 1);
};

/// Round circle on the ideal sphere: the points x with x . axis = cos(angle).
/// The cap around `axis` is called its inside.
struct IdealCircle {
  Vec3 axis = Vec3(0, 0, 1);
  double angle = 0.5 * 3.141592653589793;  // in (0, pi)

  IdealCircle() = default;
  IdealCircle(const Vec3& axis, double angle);
  IdealCircle flipped() const;
};

enum class CapSide { Inside, Outside };

/// Generalized sphere F(x) = a|x|^2 - 2 b.x + c = 0 normalized so that
/// |b|^2 - a c = 1. The positive side is {F < 0}; with this normalization the
/// mean curvature toward the positive side is (a - c) / 2 and the Euclidean
/// radius is 1/|a| (a plane when a == 0).
struct GeneralizedSphere {
  double a = 0.0;
  Vec3 b = Vec3(0, 0, 1);
  double c = 0.0;

  double eval(const Vec3& x) const { return a * x.squaredNorm() - 2.0 * b.dot(x) + c; }
  /// Signed Euclidean distance, positive on the positive side.
  double signed_distance(const Vec3& x) const;
  /// Unit normal pointing to the positive side at a carrier point.
  Vec3 positive_normal(const Vec3& x) const;
  double mean_curvature() const { return 0.5 * (a - c); }
  bool is_plane() const { return a == 0.0; }
  Vec3 center() const { return b / a; }
  double radius() const { return 1.0 / std::abs(a); }
  GeneralizedSphere reversed() const { return {-a, -b, -c}; }
  GeneralizedSphere normalized() const;
};

enum class LeafKind { GeodesicPlane, Equidistant, Horosphere, GeodesicSphere };

/// Model hypersurface with an explicit co-orientation (the carrier's
/// positive side) and its exact mean curvature toward that side.
struct CanonicalLeaf {
  LeafKind kind = LeafKind::GeodesicPlane;
  GeneralizedSphere carrier;
  double mean_curvature = 0.0;
  /// Ideal circle and co-oriented side, only meaningful for planes and
  /// equidistant leaves. The positive side faces the inside of `circle`.
  IdealCircle circle;
};

enum class Side { Negative = -1, On = 0, Positive = 1 };

double conformal_factor(const BallPoint& p);
double conformal_factor(const Vec3& p);

double hyp_distance(const BallPoint& p, const BallPoint& q);
double hyp_distance(const Vec3& p, const Vec3& q);
double hyp_distance(const HalfSpacePoint& p, const HalfSpacePoint& q);

// Cayley transform. The ideal point (0,0,-1) maps to the half-space origin,
// (0,0,1) to infinity and the ball origin to (0,0,1).
HalfSpacePoint to_half_space(const BallPoint& p);
BallPoint to_ball(const HalfSpacePoint& p);
/// Extension to all of R^3 minus the north pole (used for carriers).
Vec3 cayley_to_half(const Vec3& x);
Vec3 cayley_to_ball(const Vec3& y);
/// Ideal points to boundary-plane points. Rejects the north pole.
Vec2 ideal_to_plane(const IdealPoint& p);
IdealPoint plane_to_ideal(const Vec2& q);

/// Rotation of the ball taking `center` to (0,0,-1), so that the Cayley
/// transform sends it to the half-space origin. Azimuths are measured in
/// the (e1, e2) plane.
class Frame {
 public:
  Frame() : Frame(IdealPoint()) {}
  explicit Frame(const IdealPoint& center);

  const Vec3& center() const { return c_; }
  const Vec3& e1() const { return e1_; }
  const Vec3& e2() const { return e2_; }

  Vec3 to_local(const Vec3& x) const;
  Vec3 to_global(const Vec3& x) const;
  /// Ball (global) -> half-space coordinates of this frame, and back.
  Vec3 to_half(const Vec3& x) const { return cayley_to_half(to_local(x)); }
  Vec3 from_half(const Vec3& y) const { return to_global(cayley_to_ball(y)); }
  /// Ideal direction at polar angle rho from the center and azimuth theta.
  Vec3 ideal_direction(double rho, double theta) const;

 private:
  Vec3 c_, e1_, e2_;
};

/// Hyperbolic translation of the ball sending `a` to the origin.
Vec3 mobius_translate(const Vec3& a, const Vec3& x);

/// Translation along the vertical geodesic of the half-space model.
class DilationIsometry {
 public:
  explicit DilationIsometry(double t);
  double t() const { return t_; }
  DilationIsometry compose(const DilationIsometry& other) const { return DilationIsometry(t_ * other.t_); }

 private:
  double t_;
};

HalfSpacePoint apply_dilation(const DilationIsometry& phi, const HalfSpacePoint& p);

// Canonical leaves.
CanonicalLeaf geodesic_plane(const IdealCircle& circle, CapSide positive = CapSide::Inside);
CanonicalLeaf equidistant_leaf(const IdealCircle& circle, double H, CapSide positive = CapSide::Inside);
/// Horosphere at `at` with Euclidean radius in (0,1); inward co-orientation
/// gives mean curvature +1.
CanonicalLeaf horosphere(const IdealPoint& at, double euclidean_radius, bool inward = true);
CanonicalLeaf geodesic_sphere(const BallPoint& center, double hyperbolic_radius, bool inward = true);

double mean_curvature_of(const CanonicalLeaf& leaf);
Side side_of(const CanonicalLeaf& leaf, const BallPoint& p, double tol = kPredicateTol);
/// Signed hyperbolic distance from p to a plane or equidistant leaf,
/// positive on the leaf's positive side.
double signed_hyp_distance(const CanonicalLeaf& leaf, const Vec3& p);

/// A sampled closed ideal curve together with one ideal point known to lie
/// in its positive region.
struct SampledCurve {
  std::vector<IdealPoint> samples;
  IdealPoint positive_ref;
};

/// Point-in-region test on the sphere: true when `u` lies in the same
/// complementary region of the closed polyline as `positive_ref`.
bool in_positive_region(const SampledCurve& curve, const Vec3& u);

/// Outer approximation of the H-shifted convex hull by `budget` supporting
/// circles. Directions follow a nested golden-angle spiral around
/// positive_ref, so the first k circles of a larger budget are the circles
/// of budget k.
class ShiftedHull {
 public:
  ShiftedHull(const SampledCurve& curve, double H, int budget);

  /// Minimum signed hyperbolic distance to the bounding leaves; negative
  /// outside the hull.
  double margin(const Vec3& p) const;
  double H() const { return H_; }
  std::size_t circle_count() const { return halfspaces_.size(); }

 private:
  struct Bound {
    GeneralizedSphere plane;  // geodesic plane co-oriented to the supporting side
    double shift;             // signed offset of the shifted leaf from `plane`
  };
  double H_;
  std::vector<Bound> halfspaces_;
};

/// Supporting H-shifted halfspace: the region on one side of the realizing
/// equidistant leaf.
struct ShiftedHalfspace {
  IdealCircle ideal_sphere;
  double H = 0.0;
  CapSide side = CapSide::Inside;
  CanonicalLeaf realized_leaf;
};

ShiftedHalfspace make_shifted_halfspace(const IdealCircle& circle, double H, CapSide side);

double shifted_hull_margin(const SampledCurve& curve, double H, const BallPoint& p, int budget);

/// Nested direction sequence used for supporting circles (k = 0 is `axis`).
Vec3 spiral_direction(const Frame& frame, int k);

}  // namespace cmcfol
