// Discrete minimization of I_H = A + 2 H V over pinned disk meshes.
#pragma once

#include "cmcfol/kernels.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmcfol {

struct SolverConfig {
  double eps = 0.02;
  int resolution = 3000;
  int max_iterations = 4000;
  double tolerance = 1e-4;   // area-normalized gradient norm in the hyperbolic metric
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  double max_displacement = 0.05;  // hyperbolic length per step and vertex
  double h_cap = 0.95;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Comparison surface M sharing the boundary ring of S.
struct ReferenceSurface {
  std::vector<Vec3> vertices;
  std::vector<Tri> triangles;
  std::vector<int> boundary;
};

/// Cone from `apex` over the boundary ring of s, wound like s along the ring.
ReferenceSurface cone_reference(const DiscreteSurface& s, const Vec3& apex);
/// Interior point of every shifted hull of the curve used as the default apex.
Vec3 hull_interior_point(const IdealCurve& curve);

struct EnergyBreakdown {
  double A = 0.0;
  double V = 0.0;
  double I = 0.0;
};

EnergyBreakdown energy(const DiscreteSurface& s, double H, const ReferenceSurface& m);
/// Gradient of I with respect to vertex positions; pinned rows are zero.
std::vector<Vec3> energy_gradient(const DiscreteSurface& s, double H, const ReferenceSurface& m);

struct ResidualStats {
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
  std::vector<double> per_vertex;  // signed, interior vertices in index order
};

/// Discrete H - H_S per interior vertex: the normal component of the energy
/// gradient divided by 2 lambda times the vertex hyperbolic area.
ResidualStats mean_curvature_residual(const DiscreteSurface& s, double H);

/// Per-vertex hyperbolic areas (a third of each incident triangle).
std::vector<double> vertex_areas(const DiscreteSurface& s);
/// Unit vertex normals toward the positive side.
std::vector<Vec3> vertex_normals(const DiscreteSurface& s);

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  double min_triangle_area = 0.0;
  EnergyBreakdown energy;
  ResidualStats residual;
  std::vector<double> energy_trace;  // I after every accepted step
  std::string message;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, SolveReport report, DiscreteSurface last)
      : std::runtime_error(what), report_(std::move(report)), last_(std::move(last)) {}
  const SolveReport& report() const { return report_; }
  /// Iterate at the time of failure.
  const DiscreteSurface& last() const { return last_; }

 private:
  SolveReport report_;
  DiscreteSurface last_;
};

struct SolveResult {
  DiscreteSurface surface;
  SolveReport report;
};

/// Throws std::invalid_argument on bad input and SolverFailure on collapse or
/// non-convergence.
SolveResult solve(const IdealCurve& curve, double H, const SolverConfig& cfg,
                  const DiscreteSurface* warm_start = nullptr);

/// Moves a solved leaf toward the leaf of H_new: interior vertices are offset
/// along the normal by the spacing of exact equidistant leaves and the ring is
/// replaced by the collar ring of H_new.
DiscreteSurface predict_leaf(const IdealCurve& curve, const DiscreteSurface& from, double H_new);

struct LeafFamily {
  IdealCurve curve;
  std::vector<double> H;
  std::vector<DiscreteSurface> leaves;
  std::vector<SolveReport> reports;
  std::size_t size() const { return leaves.size(); }
};

class SweepFailure : public std::runtime_error {
 public:
  SweepFailure(const std::string& what, LeafFamily partial, double H, SolveReport report)
      : std::runtime_error(what), partial_(std::move(partial)), H_(H), report_(std::move(report)) {}
  const LeafFamily& partial() const { return partial_; }
  double failed_H() const { return H_; }
  const SolveReport& report() const { return report_; }

 private:
  LeafFamily partial_;
  double H_;
  SolveReport report_;
};

/// Solves every H of a strictly increasing grid. With jobs == 1 leaves are
/// solved outward from the smallest |H| with warm starts (a stalled warm
/// start is redone from the cold template); with jobs > 1
/// every leaf starts cold and leaves run concurrently.
LeafFamily sweep(const IdealCurve& curve, const std::vector<double>& grid, const SolverConfig& cfg, int jobs = 1);

}  // namespace cmcfol
