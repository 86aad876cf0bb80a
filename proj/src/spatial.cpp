#include "cmcfol/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmcfol {

double Box::distance_sq(const Vec3& p) const {
  const Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec3::Zero());
  return d.squaredNorm();
}

bool Box::overlaps(const Box& b) const {
  return (lo.array() <= b.hi.array()).all() && (b.lo.array() <= hi.array()).all();
}

// Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  const double den = 1.0 / (va + vb + vc);
  return a + ab * (vb * den) + ac * (vc * den);
}

double segment_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 d = q - p;
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 h = d.cross(e2);
  const double det = e1.dot(h);
  const double scale = e1.norm() * e2.norm() * d.norm();
  if (std::abs(det) <= 1e-14 * scale) return -1.0;
  const double inv = 1.0 / det;
  const Vec3 s = p - a;
  const double u = inv * s.dot(h);
  if (u < 0.0 || u > 1.0) return -1.0;
  const Vec3 qv = s.cross(e1);
  const double v = inv * d.dot(qv);
  if (v < 0.0 || u + v > 1.0) return -1.0;
  const double t = inv * e2.dot(qv);
  return (t >= 0.0 && t <= 1.0) ? t : -1.0;
}

bool triangles_intersect(const Vec3* t0, const Vec3* t1) {
  for (int pass = 0; pass < 2; ++pass) {
    const Vec3* e = pass == 0 ? t0 : t1;
    const Vec3* f = pass == 0 ? t1 : t0;
    for (int i = 0; i < 3; ++i) {
      if (segment_triangle(e[i], e[(i + 1) % 3], f[0], f[1], f[2]) >= 0.0) return true;
    }
  }
  return false;
}

TriangleTree::TriangleTree(const DiscreteSurface& s) : s_(&s) {
  const int n = static_cast<int>(s.triangles.size());
  boxes_.resize(n);
  centroids_.resize(n);
  for (int t = 0; t < n; ++t) {
    Vec3 c[3];
    corners(t, c);
    for (const auto& x : c) boxes_[t].grow(x);
    centroids_[t] = (c[0] + c[1] + c[2]) / 3.0;
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * static_cast<std::size_t>(n) + 1);
  if (n > 0) build(0, n);
}

void TriangleTree::corners(int tri, Vec3 out[3]) const {
  for (int k = 0; k < 3; ++k) out[k] = s_->vertices[s_->triangles[tri][k]];
}

int TriangleTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Box box, cbox;
  for (int i = begin; i < end; ++i) {
    box.grow(boxes_[order_[i]]);
    cbox.grow(centroids_[order_[i]]);
  }
  nodes_[id].box = box;
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= 4) return id;
  int axis = 0;
  (cbox.hi - cbox.lo).maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  // Ties broken by index so the tree is reproducible.
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
    const double ca = centroids_[a][axis], cb = centroids_[b][axis];
    return ca < cb || (ca == cb && a < b);
  });
  const int l = build(begin, mid);
  const int r = build(mid, end);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

TriangleTree::Nearest TriangleTree::nearest(const Vec3& p, double cutoff) const {
  Nearest best;
  best.distance = cutoff;
  if (nodes_.empty()) return best;
  double best_sq = cutoff >= 1e150 ? 1e300 : cutoff * cutoff;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& nd = nodes_[stack.back()];
    stack.pop_back();
    if (nd.box.distance_sq(p) >= best_sq) continue;
    if (nd.left < 0) {
      for (int i = nd.begin; i < nd.end; ++i) {
        Vec3 c[3];
        corners(order_[i], c);
        const Vec3 x = closest_point_on_triangle(p, c[0], c[1], c[2]);
        const double d = (x - p).squaredNorm();
        if (d < best_sq) {
          best_sq = d;
          best.triangle = order_[i];
          best.point = x;
        }
      }
      continue;
    }
    const double dl = nodes_[nd.left].box.distance_sq(p), dr = nodes_[nd.right].box.distance_sq(p);
    // Visit the nearer child first.
    if (dl < dr) {
      stack.push_back(nd.right);
      stack.push_back(nd.left);
    } else {
      stack.push_back(nd.left);
      stack.push_back(nd.right);
    }
  }
  if (best.triangle >= 0) best.distance = std::sqrt(best_sq);
  return best;
}

std::vector<double> TriangleTree::segment_hits(const Vec3& p, const Vec3& q) const {
  std::vector<double> hits;
  if (nodes_.empty()) return hits;
  Box seg;
  seg.grow(p);
  seg.grow(q);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& nd = nodes_[stack.back()];
    stack.pop_back();
    if (!nd.box.overlaps(seg)) continue;
    if (nd.left < 0) {
      for (int i = nd.begin; i < nd.end; ++i) {
        Vec3 c[3];
        corners(order_[i], c);
        const double t = segment_triangle(p, q, c[0], c[1], c[2]);
        if (t >= 0.0) hits.push_back(t);
      }
      continue;
    }
    stack.push_back(nd.left);
    stack.push_back(nd.right);
  }
  std::sort(hits.begin(), hits.end());
  // A segment through a shared edge or vertex hits every incident triangle.
  hits.erase(std::unique(hits.begin(), hits.end(), [](double a, double b) { return b - a < 1e-12; }), hits.end());
  return hits;
}

std::pair<int, int> TriangleTree::first_intersection(const TriangleTree& other) const {
  if (nodes_.empty() || other.nodes_.empty()) return {-1, -1};
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [ia, ib] = stack.back();
    stack.pop_back();
    const Node& a = nodes_[ia];
    const Node& b = other.nodes_[ib];
    if (!a.box.overlaps(b.box)) continue;
    const bool a_leaf = a.left < 0, b_leaf = b.left < 0;
    if (a_leaf && b_leaf) {
      for (int i = a.begin; i < a.end; ++i) {
        Vec3 ca[3];
        corners(order_[i], ca);
        for (int j = b.begin; j < b.end; ++j) {
          Vec3 cb[3];
          other.corners(other.order_[j], cb);
          if (triangles_intersect(ca, cb)) return {order_[i], other.order_[j]};
        }
      }
      continue;
    }
    if (!a_leaf && (b_leaf || a.end - a.begin >= b.end - b.begin)) {
      stack.push_back({a.right, ib});
      stack.push_back({a.left, ib});
    } else {
      stack.push_back({ia, b.right});
      stack.push_back({ia, b.left});
    }
  }
  return {-1, -1};
}

double mesh_distance(const TriangleTree& a, const TriangleTree& b) {
  double best = 1e300;
  for (const auto& v : a.surface().vertices) best = std::min(best, b.nearest(v, best).distance);
  for (const auto& v : b.surface().vertices) best = std::min(best, a.nearest(v, best).distance);
  return best;
}

}  // namespace cmcfol
