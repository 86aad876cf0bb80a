#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmcfol/kernels.hpp"
#include "cmcfol/oracle.hpp"
#include "cmcfol/solver.hpp"
#include "oracles.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cmcfol;

namespace {

constexpr double kPi = std::numbers::pi;
const IdealCircle kEquator(Vec3(0, 0, 1), kPi / 2);

IdealCurve trefoil() {
  return IdealCurve(IdealPoint(Vec3(0.3, 0.2, 0.9).normalized()), kPi / 3, {0, 0, 0.2}, {0, 0, 0});
}

ReferenceSurface self_reference(const DiscreteSurface& s) { return {s.vertices, s.triangles, s.boundary}; }

// Interior vertices moved by a random hyperbolic-scale offset.
DiscreteSurface jitter(DiscreteSurface s, double amount, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const auto pinned = s.pinned_mask();
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    if (pinned[i]) continue;
    Vec3& v = s.vertices[i];
    v += amount * (1.0 - v.squaredNorm()) * Vec3(g(rng), g(rng), g(rng));
  }
  return s;
}

}  // namespace

TEST_CASE("initial mesh audit") {
  const DiscreteSurface s = build_initial_mesh(trefoil(), 0.3, 0.02, 3000);
  const MeshAudit a = audit_mesh(s);
  CHECK(a.euler == 1);
  CHECK(a.boundary_matches);
  CHECK(a.consistent_winding);
  CHECK(a.inside_guard);
  CHECK(a.area_ratio < 10.0);
  CHECK(a.ok());

  const DiscreteSurface big = build_initial_mesh(trefoil(), -0.5, 0.02, 10000);
  double rmax = 0.0;
  for (const Vec3& v : big.vertices) rmax = std::max(rmax, v.norm());
  CHECK(rmax <= 1.0 - 0.005);
  CHECK(audit_mesh(big).ok());

  CHECK_THROWS_AS(build_initial_mesh(trefoil(), 0.3, 0.02, 150), std::invalid_argument);
}

TEST_CASE("winding points toward the positive side") {
  const IdealCircle c(Vec3(0, 0, 1), kPi / 3);
  const DiscreteSurface s = exact_cap(c, 0.4, 2000);
  const CanonicalLeaf plane = geodesic_plane(c);
  // The positive side is away from the leaf of larger H, i.e. toward the plane
  // for H > 0: moving a vertex along its normal lowers its distance below.
  const auto n = vertex_normals(s);
  for (std::size_t i = 0; i < s.vertices.size(); i += 37) {
    const Vec3 x = s.vertices[i];
    const double d0 = signed_hyp_distance(plane, x);
    const double d1 = signed_hyp_distance(plane, x + 1e-4 * (1 - x.squaredNorm()) * n[i]);
    CHECK(d1 > d0);
  }
}

TEST_CASE("serial and OpenMP kernels agree") {
  const DiscreteSurface s = jitter(build_initial_mesh(trefoil(), 0.2, 0.02, 2000), 0.01, 3);
  const Incidence inc = make_incidence(s);
  const SurfaceTerms a = kernels::evaluate_serial(s.vertices, s.triangles, true);
  const SurfaceTerms b = kernels::evaluate_omp(s.vertices, s.triangles, inc, true);
  CHECK(b.A == doctest::Approx(a.A).epsilon(1e-12));
  CHECK(b.Phi == doctest::Approx(a.Phi).epsilon(1e-12));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.gA.size(); ++i) {
    worst = std::max(worst, (a.gA[i] - b.gA[i]).norm() / (1e-30 + a.gA[i].norm()));
    worst = std::max(worst, (a.gPhi[i] - b.gPhi[i]).norm() / (1e-30 + a.gPhi[i].norm()));
  }
  CHECK(worst < 1e-10);

  // Thread count does not change a single bit.
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const SurfaceTerms one = kernels::evaluate_omp(s.vertices, s.triangles, inc, true);
  omp_set_num_threads(4);
  const SurfaceTerms four = kernels::evaluate_omp(s.vertices, s.triangles, inc, true);
  omp_set_num_threads(saved);
  CHECK(one.A == four.A);
  CHECK(one.Phi == four.Phi);
  bool same = true;
  for (std::size_t i = 0; i < one.gA.size(); ++i) same = same && one.gA[i] == four.gA[i] && one.gPhi[i] == four.gPhi[i];
  CHECK(same);
}

TEST_CASE("volume field has the hyperbolic volume density as divergence") {
  for (double r : {0.0, 0.1, 0.5, 0.9, 0.99}) {
    const Vec3 x = r * Vec3(0.6, 0.0, 0.8);
    const double h = 1e-5;
    double div = 0.0;
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = h;
      div += (volume_field(x + e)[k] - volume_field(x - e)[k]) / (2 * h);
    }
    CHECK(div == doctest::Approx(std::pow(2.0 / (1.0 - r * r), 3)).epsilon(r > 0.95 ? 1e-4 : 1e-6));
  }
}

TEST_CASE("energy of coincident surfaces") {
  const DiscreteSurface s = jitter(build_initial_mesh(trefoil(), 0.5, 0.02, 800), 0.02, 4);
  const EnergyBreakdown e = energy(s, 0.5, self_reference(s));
  CHECK(e.V == 0.0);
  CHECK(e.I == e.A);
}

TEST_CASE("area of the truncated geodesic plane") {
  const DiscreteSurface s = exact_cap(kEquator, 0.0, 4000, 0.02);
  for (const Vec3& v : s.vertices) REQUIRE(std::abs(v.z()) < 1e-12);
  double re = 0.0;
  for (int b : s.boundary) re += s.vertices[b].norm() / s.boundary.size();
  const double closed = 4.0 * kPi * re * re / (1.0 - re * re);
  const EnergyBreakdown e = energy(s, 0.0, cone_reference(s, Vec3::Zero()));
  CHECK(std::abs(e.A / closed - 1.0) < 5e-3);
  CHECK(e.I == e.A);
}

TEST_CASE("reference swap shifts the energy by a constant") {
  const DiscreteSurface base = build_initial_mesh(trefoil(), 0.4, 0.02, 600);
  const ReferenceSurface m1 = cone_reference(base, hull_interior_point(trefoil()));
  const ReferenceSurface m2 = cone_reference(base, Vec3(0.1, 0.05, 0.2));
  std::vector<double> diff;
  for (int k = 0; k < 10; ++k) {
    const DiscreteSurface s = jitter(base, 0.03, 100 + k);
    diff.push_back(energy(s, 0.4, m1).I - energy(s, 0.4, m2).I);
  }
  double mean = 0.0, var = 0.0;
  for (double d : diff) mean += d / diff.size();
  for (double d : diff) var += (d - mean) * (d - mean) / diff.size();
  CHECK(var < 1e-9);
  CHECK(std::abs(mean) > 1e-6);  // the references really differ
}

TEST_CASE("energy rejects a reference with a different boundary") {
  const DiscreteSurface s = build_initial_mesh(trefoil(), 0.0, 0.02, 600);
  ReferenceSurface m = cone_reference(s, Vec3::Zero());
  m.vertices[m.boundary[0]] *= 0.99;
  CHECK_THROWS_AS(energy(s, 0.0, m), std::invalid_argument);
}

TEST_CASE("energy gradient matches central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uh(-0.8, 0.8);
  for (int trial = 0; trial < 3; ++trial) {
    const double H = uh(rng);
    const DiscreteSurface s = jitter(build_initial_mesh(trefoil(), H, 0.02, 300), 0.02, 200 + trial);
    const ReferenceSurface m = cone_reference(s, hull_interior_point(trefoil()));
    const auto g = energy_gradient(s, H, m);
    const auto pinned = s.pinned_mask();
    double num = 0.0, den = 0.0;
    DiscreteSurface t = s;
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        double fd = 0.0;
        if (!pinned[i]) {
          const double h = 1e-6;
          t.vertices[i][k] = s.vertices[i][k] + h;
          const double ip = energy(t, H, m).I;
          t.vertices[i][k] = s.vertices[i][k] - h;
          const double im = energy(t, H, m).I;
          t.vertices[i][k] = s.vertices[i][k];
          fd = (ip - im) / (2 * h);
        }
        num += (g[i][k] - fd) * (g[i][k] - fd);
        den += fd * fd;
      }
    }
    CHECK(std::sqrt(num / den) < 1e-5);
  }
}

TEST_CASE("gradient at the exact cap") {
  const IdealCurve round = round_curve(IdealCircle(Vec3(0, 0, 1), kPi / 3));
  for (double H : {0.0, 0.5}) {
    const DiscreteSurface s = exact_cap(IdealCircle(Vec3(0, 0, 1), kPi / 3), H, 3000);
    const auto g = energy_gradient(s, H, cone_reference(s, hull_interior_point(round)));
    // Gradient as a covector measured in the hyperbolic metric: |g| / lambda.
    double n2 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      n2 += g[i].squaredNorm() / std::pow(conformal_factor(s.vertices[i]), 2);
      e2 += g[i].squaredNorm();
    }
    MESSAGE("H = " << H << ": hyperbolic norm " << std::sqrt(n2) << ", Euclidean norm " << std::sqrt(e2));
    CHECK(std::sqrt(n2) < 5e-3 * std::sqrt(static_cast<double>(s.vertices.size())));
  }
}

TEST_CASE("area gradient on a geodesic plane is normal dominated") {
  // A bumped plane: the area gradient is H times the normal up to
  // discretization, so its tangential part is small.
  DiscreteSurface s = exact_cap(kEquator, 0.0, 3000);
  const auto pinned = s.pinned_mask();
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    if (pinned[i]) continue;
    const double r2 = s.vertices[i].head<2>().squaredNorm();
    s.vertices[i].z() += 0.05 * std::exp(-r2 / 0.1);
  }
  const SurfaceTerms t = kernels::evaluate_serial(s.vertices, s.triangles, true);
  const auto n = vertex_normals(s);
  double tn = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    if (pinned[i] || s.vertices[i].norm() > 0.6) continue;
    const double a = t.gA[i].dot(n[i]);
    nn += a * a;
    tn += (t.gA[i] - a * n[i]).squaredNorm();
  }
  CHECK(std::sqrt(tn / nn) < 0.1);
}

TEST_CASE("mean curvature residual") {
  const IdealCircle c(Vec3(0, 0, 1), kPi / 3);
  const ResidualStats r = mean_curvature_residual(exact_cap(c, 0.5, 10000), 0.5);
  CHECK(r.median < 5e-3);
  const ResidualStats coarse = mean_curvature_residual(exact_cap(c, 0.5, 2500), 0.5);
  CHECK(coarse.median / r.median >= 1.5);
  const ResidualStats off = mean_curvature_residual(exact_cap(c, 0.5, 10000), 0.7);
  CHECK(off.median > 0.1);
}
