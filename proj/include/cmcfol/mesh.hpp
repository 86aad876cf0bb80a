// Triangulated disk surfaces in the ball model and their initial meshing.
#pragma once

#include "cmcfol/boundary.hpp"

#include <array>
#include <vector>

namespace cmcfol {

using Tri = std::array<int, 3>;

enum class Provenance { Initial, Solved };

/// Triangulated disk. Triangle winding defines the co-orientation: the
/// normal (x1 - x0) x (x2 - x0) points to the positive side (toward Omega+).
struct DiscreteSurface {
  std::vector<Vec3> vertices;
  std::vector<Tri> triangles;
  std::vector<int> boundary;  // pinned ring, in curve order
  double H = 0.0;
  double eps = 0.02;
  Provenance provenance = Provenance::Initial;

  std::size_t vertex_count() const { return vertices.size(); }
  std::vector<char> pinned_mask() const;
};

/// Vertex -> (triangle, corner) adjacency in CSR form, in increasing
/// triangle order. Used for deterministic gathers.
struct Incidence {
  std::vector<int> offset;  // size n + 1
  std::vector<int> tri;
  std::vector<int> corner;
};

Incidence make_incidence(const DiscreteSurface& s);

/// Hyperbolic area of one triangle by the edge-midpoint rule.
double triangle_hyp_area(const Vec3& a, const Vec3& b, const Vec3& c);

struct MeshAudit {
  int euler = 0;
  bool boundary_matches = false;
  bool consistent_winding = false;
  bool inside_guard = false;  // all |p| <= 1 - eps/4
  double area_ratio = 0.0;    // max / min triangle hyperbolic area
  bool ok() const { return euler == 1 && boundary_matches && consistent_winding && inside_guard; }
};

MeshAudit audit_mesh(const DiscreteSurface& s);

/// Disk mesh over the exact cap of the best-fit circle of `curve`, warped
/// radially onto the curve, with the collar ring pinned at height eps.
// Rows below this star-frame height are blended toward the collar model.
inline constexpr double kCollarBlend = 0.05;

DiscreteSurface build_initial_mesh(const IdealCurve& curve, double H, double eps, int target_vertices);

/// Best-fit round circle (mean planar radius about the star center).
double best_fit_planar_radius(const IdealCurve& curve);

/// Exact equidistant leaf of the best-fit circle, co-oriented toward Omega+.
CanonicalLeaf template_leaf(const IdealCurve& curve, double H);

}  // namespace cmcfol
