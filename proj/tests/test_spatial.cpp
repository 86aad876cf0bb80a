#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmcfol/oracle.hpp"
#include "cmcfol/spatial.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace cmcfol;

namespace {

constexpr double kPi = std::numbers::pi;

// Closest point by dense barycentric sampling.
double brute_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, int n = 400) {
  double best = 1e300;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const double u = double(i) / n, v = double(j) / n;
      best = std::min(best, (p - (a + u * (b - a) + v * (c - a))).norm());
    }
  }
  return best;
}

}  // namespace

TEST_CASE("closest point on a triangle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < 30; ++t) {
    const Vec3 a(U(rng), U(rng), U(rng)), b(U(rng), U(rng), U(rng)), c(U(rng), U(rng), U(rng));
    const Vec3 p = 2.0 * Vec3(U(rng), U(rng), U(rng));
    const double d = (p - closest_point_on_triangle(p, a, b, c)).norm();
    const double brute = brute_triangle_distance(p, a, b, c);
    CHECK(d <= brute + 1e-12);
    CHECK(d >= brute - 1e-2);
  }
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  CHECK((closest_point_on_triangle(Vec3(0.2, 0.2, 3), a, b, c) - Vec3(0.2, 0.2, 0)).norm() < 1e-15);
  CHECK((closest_point_on_triangle(Vec3(-1, -1, 0), a, b, c) - a).norm() < 1e-15);
  CHECK((closest_point_on_triangle(Vec3(1, 1, 0), a, b, c) - Vec3(0.5, 0.5, 0)).norm() < 1e-15);
}

TEST_CASE("segment against triangle") {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  CHECK(segment_triangle(Vec3(0.2, 0.2, -1), Vec3(0.2, 0.2, 3), a, b, c) == doctest::Approx(0.25));
  CHECK(segment_triangle(Vec3(0.8, 0.8, -1), Vec3(0.8, 0.8, 1), a, b, c) < 0.0);
  CHECK(segment_triangle(Vec3(0.2, 0.2, 1), Vec3(0.2, 0.2, 3), a, b, c) < 0.0);
  CHECK(segment_triangle(Vec3(0.2, 0.2, 1), Vec3(0.4, 0.2, 1), a, b, c) < 0.0);
}

TEST_CASE("triangle overlap") {
  const Vec3 t0[3] = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  const Vec3 pierce[3] = {Vec3(0.2, 0.2, -1), Vec3(0.3, 0.2, 1), Vec3(0.2, 0.3, 1)};
  const Vec3 above[3] = {Vec3(0.2, 0.2, 0.1), Vec3(0.3, 0.2, 1), Vec3(0.2, 0.3, 1)};
  const Vec3 beside[3] = {Vec3(2, 0, -1), Vec3(2, 1, 1), Vec3(3, 0, 1)};
  CHECK(triangles_intersect(t0, pierce));
  CHECK(triangles_intersect(pierce, t0));
  CHECK_FALSE(triangles_intersect(t0, above));
  CHECK_FALSE(triangles_intersect(t0, beside));
}

TEST_CASE("tree queries agree with brute force") {
  const IdealCircle circle(Vec3(0, 0, 1), kPi / 3);
  const DiscreteSurface s = exact_cap(circle, 0.3, 1500);
  const TriangleTree tree(s);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  for (int t = 0; t < 40; ++t) {
    const Vec3 p(U(rng), U(rng), U(rng));
    double brute = 1e300;
    for (const Tri& tri : s.triangles) {
      const Vec3 q = closest_point_on_triangle(p, s.vertices[tri[0]], s.vertices[tri[1]], s.vertices[tri[2]]);
      brute = std::min(brute, (p - q).norm());
    }
    CHECK(tree.nearest(p).distance == doctest::Approx(brute).epsilon(1e-14));
  }

  // A vertical segment through the cap's axis hits it once.
  const auto hits = tree.segment_hits(Vec3(0, 0, -0.9), Vec3(0, 0, 0.99));
  CHECK(hits.size() == 1);
  CHECK(tree.segment_hits(Vec3(0.9, 0, 0.3), Vec3(0.9, 0.1, 0.3)).empty());
}

TEST_CASE("mesh intersection and distance") {
  const IdealCircle circle(Vec3(0, 0, 1), kPi / 3);
  const DiscreteSurface a = exact_cap(circle, -0.3, 1200), b = exact_cap(circle, 0.3, 1200);
  const TriangleTree ta(a), tb(b);
  CHECK(ta.first_intersection(tb) == std::pair<int, int>(-1, -1));
  CHECK(mesh_distance(ta, tb) > 0.0);

  // Push b's interior through a along the axis.
  const double za = ta.segment_hits(Vec3(0, 0, -0.99), Vec3(0, 0, 0.99))[0];
  const double zb = tb.segment_hits(Vec3(0, 0, -0.99), Vec3(0, 0, 0.99))[0];
  DiscreteSurface c = b;
  const auto pinned = c.pinned_mask();
  for (std::size_t i = 0; i < c.vertices.size(); ++i) {
    if (!pinned[i] && c.vertices[i].head<2>().norm() < 0.2) c.vertices[i].z() += 2.0 * 1.98 * (za - zb);
  }
  const TriangleTree tc(c);
  CHECK(ta.first_intersection(tc).first >= 0);
}
