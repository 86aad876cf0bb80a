#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmcfol/boundary.hpp"
#include "cmcfol/oracle.hpp"

#include <cmath>
#include <numbers>

using namespace cmcfol;

namespace {

constexpr double kPi = std::numbers::pi;
const IdealCircle kEquator(Vec3(0, 0, 1), kPi / 2);

// Signed distance to the plane z = 0 in the ball model.
double equator_distance(const Vec3& x) { return std::asinh(2.0 * x.z() / (1.0 - x.squaredNorm())); }

}  // namespace

TEST_CASE("exact cap of the equator") {
  const DiscreteSurface plane = exact_cap(kEquator, 0.0, 2000);
  for (const Vec3& v : plane.vertices) CHECK(std::abs(v.z()) < 1e-12);

  const DiscreteSurface s = exact_cap(kEquator, 0.5, 2000);
  CHECK(s.H == 0.5);
  double worst = 0.0;
  for (const Vec3& v : s.vertices) worst = std::max(worst, std::abs(std::abs(equator_distance(v)) - std::atanh(0.5)));
  CHECK(worst < 1e-9);
  CHECK(max_cap_deviation(s, kEquator, 0.5) < 1e-9);
}

TEST_CASE("reflection in the equator exchanges H and -H") {
  for (double H : {0.3, 0.7}) {
    const DiscreteSurface s = exact_cap(kEquator, -H, 1500);
    double worst = 0.0;
    for (Vec3 v : s.vertices) {
      v.z() = -v.z();
      worst = std::max(worst, distance_to_cap(kEquator, H, CapSide::Inside, v));
    }
    CHECK(worst < 1e-9);
    // Without the reflection the two leaves sit 2 atanh(H) apart.
    CHECK(distance_to_cap(kEquator, H, CapSide::Inside, s.vertices[0]) ==
          doctest::Approx(2 * std::atanh(H)).epsilon(1e-9));
  }
}

TEST_CASE("deviation grows with distance from the leaf") {
  const IdealCircle c(Vec3(0.6, 0, 0.8), kPi / 4);
  const DiscreteSurface s = exact_cap(c, 0.4, 1500);
  CHECK(max_cap_deviation(s, c, 0.4) < 1e-9);
  CHECK(max_cap_deviation(s, c, 0.2) == doctest::Approx(std::atanh(0.4) - std::atanh(0.2)).epsilon(1e-9));
}

TEST_CASE("hull margin of exact caps") {
  const IdealCircle c(Vec3(0, 0, 1), kPi / 3);
  const SampledCurve curve = sampled(round_curve(c), 512);
  for (double H : {-0.4, 0.0, 0.4}) {
    const ShiftedHull hull(curve, H, 256);
    const DiscreteSurface s = exact_cap(c, H, 1500);
    double lo = 1e300;
    for (const Vec3& v : s.vertices) lo = std::min(lo, hull.margin(v));
    MESSAGE("H = " << H << ": min margin " << lo);
    CHECK(lo > -1e-6);
  }
  // The H = 0 leaf leaves the H = 0.5 hull.
  const ShiftedHull hull(curve, 0.5, 256);
  const DiscreteSurface s = exact_cap(c, 0.0, 1500);
  double lo = 1e300;
  for (const Vec3& v : s.vertices) lo = std::min(lo, hull.margin(v));
  CHECK(lo < -0.1);
}

TEST_CASE("exact cap guards") {
  CHECK_THROWS_AS(exact_cap(kEquator, 1.0, 1000), std::invalid_argument);
  CHECK_THROWS_AS(exact_cap(kEquator, 0.2, 100), std::invalid_argument);
}
