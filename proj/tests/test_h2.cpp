#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmcfol/h2.hpp"

#include <cmath>
#include <numbers>

using namespace cmcfol;
using namespace cmcfol::h2;

namespace {

constexpr double kPi = std::numbers::pi;

// Geodesic curvature of the circle through three nearby points of a curve,
// toward the side that contains the ideal point u: k = (kappa_e - d_n log lambda) / lambda.
double conformal_curvature(const Vec2& a, const Vec2& x, const Vec2& b, const Vec2& u) {
  const Vec2 ab = a - x, cb = b - x;
  const double d = 2.0 * (ab.x() * cb.y() - ab.y() * cb.x());
  const Vec2 C = x + Vec2(cb.y() * ab.squaredNorm() - ab.y() * cb.squaredNorm(),
                          ab.x() * cb.squaredNorm() - cb.x() * ab.squaredNorm()) / d;
  const double R = (x - C).norm();
  const bool u_inside = (u - C).norm() < R;
  const Vec2 n = u_inside ? Vec2((C - x) / R) : Vec2((x - C) / R);
  const double ke = u_inside ? 1.0 / R : -1.0 / R;
  const double w = 1.0 - x.squaredNorm();
  return (ke - 2.0 * x.dot(n) / w) / (2.0 / w);
}

// Midpoint rule for the hyperbolic area of a convex polygon.
double polygon_area(const std::vector<Vec2>& poly, int n = 2000) {
  Vec2 lo = poly[0], hi = poly[0];
  for (const Vec2& p : poly) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 x = lo + Vec2((i + 0.5) * h.x(), (j + 0.5) * h.y());
      bool in = true;
      for (std::size_t k = 0; k < poly.size() && in; ++k) {
        const Vec2 e = poly[(k + 1) % poly.size()] - poly[k], r = x - poly[k];
        in = e.x() * r.y() - e.y() * r.x() >= 0.0;
      }
      if (in) sum += 4.0 / std::pow(1.0 - x.squaredNorm(), 2);
    }
  }
  return sum * h.x() * h.y();
}

}  // namespace

TEST_CASE("k = 0 arc is the diameter") {
  const H2Arc d = h2_arc(Vec2(1, 0), Vec2(-1, 0), 0.0);
  for (int i = 1; i < 10; ++i) CHECK(std::abs(d.point(i / 10.0).y()) < 1e-14);
  CHECK(d.curvature() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("k = 0.5 arc has geodesic curvature 0.5") {
  const H2Arc arc = h2_arc(Vec2(1, 0), Vec2(-1, 0), 0.5);
  CHECK(arc.curvature() == doctest::Approx(0.5).epsilon(1e-14));
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double h = 1e-4;
    const double k = conformal_curvature(arc.point(s - h), arc.point(s), arc.point(s + h), arc.u);
    CHECK(k == doctest::Approx(0.5).epsilon(1e-8));
  }
  // Meets the unit circle at 60 degrees: carrier radius against distance of centers.
  const Vec2 C = arc.b / arc.a;
  const double R = std::sqrt(C.squaredNorm() - arc.c / arc.a);
  const double cos_angle = (C.squaredNorm() - 1.0 - R * R) / (2.0 * R);
  CHECK(std::acos(std::abs(cos_angle)) == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK_THROWS_AS(h2_arc(Vec2(1, 0), Vec2(-1, 0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(h2_arc(Vec2(1, 0), Vec2(1, 0), 0.0), std::invalid_argument);
}

TEST_CASE("arcs for k and -k are mirror images") {
  const H2Arc a = h2_arc(Vec2(1, 0), Vec2(-1, 0), 0.4);
  const H2Arc b = h2_arc(Vec2(1, 0), Vec2(-1, 0), -0.4);
  for (int i = 1; i < 20; ++i) {
    const Vec2 x = a.point(i / 20.0);
    CHECK(std::abs(b.eval(Vec2(x.x(), -x.y()))) < 1e-12);
  }
}

TEST_CASE("curvature through three points") {
  const Vec2 p(1, 0), q(-1, 0);
  for (double k : {-0.7, 0.0, 0.3}) {
    const H2Arc arc = h2_arc(p, q, k);
    CHECK(curvature_through(p, q, arc.point(0.37)) == doctest::Approx(k).epsilon(1e-12));
  }
}

TEST_CASE("foliation check") {
  const Vec2 p(1, 0), q(-1, 0);
  CHECK(h2_foliation_check(p, q, {0.0}).pass);
  const FoliationReport two = h2_foliation_check(p, q, {-0.5, 0.5});
  CHECK(two.pass);
  // The center lies strictly between the two arcs.
  const H2Arc lo = h2_arc(p, q, -0.5), hi = h2_arc(p, q, 0.5);
  CHECK(lo.eval(Vec2::Zero()) * hi.eval(Vec2::Zero()) < 0.0);

  std::vector<double> grid;
  for (int i = -9; i <= 9; ++i) grid.push_back(0.1 * i);
  const FoliationReport r = h2_foliation_check(p, q, grid, 1e-12);
  CHECK(r.pass);
  CHECK(r.disjoint);
  CHECK(r.monotone);
  CHECK(r.fills);
  CHECK(r.max_distance_error < 1e-12);
  CHECK(r.max_intersection_offset < 1e-12);

  CHECK_THROWS_AS(h2_foliation_check(p, q, {0.2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(h2_foliation_check(p, q, {0.2, 1.0}), std::invalid_argument);
}

TEST_CASE("hyperbolic lengths and areas") {
  const Vec2 a(0.1, 0.2), b(-0.5, 0.4);
  const double d = std::acosh(1 + 2 * (a - b).squaredNorm() / ((1 - a.squaredNorm()) * (1 - b.squaredNorm())));
  CHECK(h2_distance(a, b) == doctest::Approx(d).epsilon(1e-13));
  CHECK(length(geodesic_segment(a, b)) == doctest::Approx(d).epsilon(1e-10));
  CHECK(length(ArcPiece{Vec2::Zero(), Vec2(0.6, 0), 0.0}) == doctest::Approx(2 * std::atanh(0.6)).epsilon(1e-12));

  // Upper half of the Euclidean circle of radius r: half of a hyperbolic disk.
  const double r = 0.5, rho = 2 * std::atanh(r);
  const Curve upper{ArcPiece{Vec2(-r, 0), Vec2(r, 0), -1.0}};
  CHECK(area_right(upper) == doctest::Approx(2 * kPi * std::pow(std::sinh(rho / 2), 2)).epsilon(1e-9));
  CHECK(energy(upper, 0.3) == doctest::Approx(length(upper) + 2 * 0.3 * area_right(upper)).epsilon(1e-14));
}

TEST_CASE("exchange on disjoint curves") {
  const Vec2 P(-0.6, 0), Q(0.6, 0);
  const Curve c1 = arc_chain({P, Vec2(0, 0.2), Q}, {0.0, 0.0});
  const Curve c2 = arc_chain({P, Vec2(0, -0.2), Q}, {0.0, 0.0});
  const ExchangeDecomposition e = h2_exchange(c1, 0.2, c2, 0.6);
  CHECK(e.Q == 0.0);
  CHECK(e.T1 == 0.0);
  CHECK(e.T2 == 0.0);
  CHECK(e.lenses == 0);
  CHECK_FALSE(e.infeasible);
  CHECK(e.reduction1 == doctest::Approx(0.0));
  CHECK(e.reduction2 == doctest::Approx(0.0));
}

TEST_CASE("symmetric crossing") {
  const Vec2 P(-0.6, 0), Q(0.6, 0);
  const Curve c1 = arc_chain({P, Vec2(-0.2, 0.2), Vec2(0.2, -0.2), Q}, {0.0, 0.0, 0.0});
  const Curve c2 = arc_chain({P, Vec2(-0.2, -0.2), Vec2(0.2, 0.2), Q}, {0.0, 0.0, 0.0});
  const ExchangeDecomposition e = h2_exchange(c1, 0.2, c2, 0.6);
  CHECK(e.lenses == 1);
  CHECK(e.T1 == doctest::Approx(e.T2).epsilon(1e-12));
  const double q = polygon_area({Vec2(0, 0), Vec2(0.2, -0.2), Q, Vec2(0.2, 0.2)});
  CHECK(e.Q == doctest::Approx(q).epsilon(1e-4));
  CHECK(e.infeasible);
  CHECK(e.consistency_error < 1e-9);
}

TEST_CASE("generated crossing pairs are always infeasible") {
  int detected = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto [c1, c2] = crossing_pair(seed);
    const ExchangeDecomposition e = h2_exchange(c1, 0.2, c2, 0.6);
    CHECK(e.Q > 0.0);
    CHECK(e.consistency_error < 1e-8);
    // The chain |T2| + 2 k2 |Q| <= |T1| <= |T2| + 2 k1 |Q| has no solution.
    CHECK(e.T2 + 2 * 0.6 * e.Q > e.T2 + 2 * 0.2 * e.Q);
    detected += e.infeasible ? 1 : 0;
  }
  CHECK(detected == 50);
  const auto a = crossing_pair(7), b = crossing_pair(7);
  CHECK(a.first[0].b == b.first[0].b);
}

TEST_CASE("exchange guards") {
  const auto [c1, c2] = crossing_pair(1);
  CHECK_THROWS_AS(h2_exchange(c1, 0.6, c2, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(h2_exchange(c1, 0.4, c2, 0.4), std::invalid_argument);
  const Curve other = arc_chain({Vec2(-0.5, 0), Vec2(0, 0.1), Vec2(0.6, 0)}, {0.0, 0.0});
  CHECK_THROWS_AS(h2_exchange(c1, 0.2, other, 0.6), std::invalid_argument);
}
