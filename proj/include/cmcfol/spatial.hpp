// Bounding-volume hierarchy over a triangle mesh: nearest points, segment
// hits and triangle-triangle overlap.
#pragma once

#include "cmcfol/mesh.hpp"

#include <utility>
#include <vector>

namespace cmcfol {

struct Box {
  Vec3 lo = Vec3::Constant(1e300);
  Vec3 hi = Vec3::Constant(-1e300);
  void grow(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void grow(const Box& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  double distance_sq(const Vec3& p) const;
  bool overlaps(const Box& b) const;
};

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Moller-Trumbore on the segment p + t (q - p), t in [0, 1]. Returns t or a
/// negative value when there is no hit.
double segment_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c);

/// True when the two triangles share a point (edge-against-face tests both
/// ways; coplanar touching is not reported).
bool triangles_intersect(const Vec3* t0, const Vec3* t1);

class TriangleTree {
 public:
  explicit TriangleTree(const DiscreteSurface& s);

  struct Nearest {
    double distance = 1e300;
    int triangle = -1;
    Vec3 point = Vec3::Zero();
  };
  Nearest nearest(const Vec3& p, double cutoff = 1e300) const;

  /// Segment parameters of every hit, sorted.
  std::vector<double> segment_hits(const Vec3& p, const Vec3& q) const;

  /// Some pair (triangle here, triangle in other) that intersects, or {-1, -1}.
  std::pair<int, int> first_intersection(const TriangleTree& other) const;

  const DiscreteSurface& surface() const { return *s_; }

 private:
  struct Node {
    Box box;
    int left = -1, right = -1;  // children, or -1 for a leaf
    int begin = 0, end = 0;     // range in order_
  };
  int build(int begin, int end);
  void corners(int tri, Vec3 out[3]) const;

  const DiscreteSurface* s_;
  std::vector<Box> boxes_;
  std::vector<Vec3> centroids_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

/// Smallest Euclidean distance between two meshes (vertices of each against
/// triangles of the other).
double mesh_distance(const TriangleTree& a, const TriangleTree& b);

}  // namespace cmcfol
