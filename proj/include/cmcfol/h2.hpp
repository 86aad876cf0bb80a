// Exact hyperbolic-plane sandbox (Poincare disk): constant-curvature arcs
// with ideal endpoints, a foliation check, and the cut-and-swap exchange
// between two crossing curves.
#pragma once

#include "cmcfol/geometry.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cmcfol::h2 {

/// Arc of constant geodesic curvature k joining ideal points p and q. The
/// carrier is a|x|^2 - 2 b.x + c = 0 with |b|^2 - a c = 1; the positive side
/// {F < 0} faces the counterclockwise ideal arc from p to q, whose midpoint
/// is u, and k is measured toward it.
struct H2Arc {
  Vec2 p, q, u;
  double half_angle = 0.0;
  double k = 0.0;
  double a = 0.0;
  Vec2 b = Vec2::Zero();
  double c = 0.0;

  double eval(const Vec2& x) const { return a * x.squaredNorm() - 2.0 * b.dot(x) + c; }
  /// Geodesic curvature toward the positive side, from the carrier.
  double curvature() const { return 0.5 * (a - c); }
  /// Point of the arc at carrier angle parameter s in [0,1] from p to q.
  Vec2 point(double s) const;
};

H2Arc h2_arc(const Vec2& p, const Vec2& q, double k);

double h2_distance(const Vec2& x, const Vec2& y);

/// Generalized circle through p, q and x, oriented like h2_arc(p, q, .).
/// Returns its curvature; |k| < 1 for every interior x.
double curvature_through(const Vec2& p, const Vec2& q, const Vec2& x);

struct FoliationReport {
  bool pass = false;
  bool disjoint = false;
  double max_intersection_offset = 0.0;  // max ||x| - 1| over carrier intersections
  bool monotone = false;
  double max_distance_error = 0.0;  // crossing distance vs -artanh k
  int probes = 0;
  bool fills = false;               // every sampled point has |k(x)| < 1
  double grid_coverage = 0.0;       // fraction of sampled points with k(x) in grid range
  std::string detail;
};

/// k_grid strictly increasing in (-1, 1).
FoliationReport h2_foliation_check(const Vec2& p, const Vec2& q, const std::vector<double>& k_grid,
                                   double tol = 1e-12);

/// Circular arc from a to b; bulge = tan(theta / 4) with theta the signed
/// turning angle (positive: counterclockwise about the center). Zero is a
/// straight segment.
struct ArcPiece {
  Vec2 a, b;
  double bulge = 0.0;
};

using Curve = std::vector<ArcPiece>;

/// Chain of arcs through the given nodes.
Curve arc_chain(const std::vector<Vec2>& nodes, const std::vector<double>& bulges);
/// Hyperbolic geodesic segment between two interior points.
ArcPiece geodesic_segment(const Vec2& a, const Vec2& b);

/// Closed-form hyperbolic length.
double length(const ArcPiece& arc);
double length(const Curve& c);
/// Flux of W(x) = 2x / (1 - |x|^2) (divergence = hyperbolic area density)
/// through the curve along its right-hand normal, by adaptive quadrature.
double right_flux(const ArcPiece& arc);
double right_flux(const Curve& c);
/// Signed hyperbolic area between the geodesic chord of the endpoints and c,
/// positive where c runs to the left of the chord (the chord minus c, as a
/// loop, is then counterclockwise).
double area_right(const Curve& c);
/// I_k(c) = L(c) + 2 k area_right(c).
double energy(const Curve& c, double k);

struct ExchangeDecomposition {
  double T1 = 0.0, T2 = 0.0, Q = 0.0;
  int lenses = 0;
  double I1 = 0.0, I1_swapped = 0.0;  // I_{k1}(c1), I_{k1}(c1')
  double I2 = 0.0, I2_swapped = 0.0;  // I_{k2}(c2), I_{k2}(c2')
  double reduction1 = 0.0, reduction2 = 0.0;
  /// |(reduction1 + reduction2) - 2 (k2 - k1) |Q||; energies of the swapped
  /// curves are evaluated directly, so this cross-checks the decomposition.
  double consistency_error = 0.0;
  bool infeasible = false;  // some swap strictly lowers an energy
};

/// Lens decomposition of two curves with common endpoints. Q is the region
/// where c2 runs to the left of c1; c1' follows the left envelope and c2'
/// the right one. Requires k1 < k2.
ExchangeDecomposition h2_exchange(const Curve& c1, double k1, const Curve& c2, double k2);

/// Two-arc chains sharing their endpoints that cross once: c1 rises first,
/// c2 later. Deterministic in the seed.
std::pair<Curve, Curve> crossing_pair(std::uint64_t seed);

}  // namespace cmcfol::h2
