// Executable checks of the foliation properties on a computed leaf family.
#pragma once

#include "cmcfol/solver.hpp"

#include <map>
#include <string>
#include <vector>

namespace cmcfol {

/// Geodesic segment from p_minus (deep on the negative side of every leaf
/// in the H range it was certified for) to p_plus. Probes built here are
/// vertical lines in the star frame's half-space model, parametrized by
/// hyperbolic arclength from p_minus.
struct ProbeLine {
  Vec3 p_minus, p_plus;
  int segments = 1000;
  double length = 0.0;
  std::vector<Vec3> polyline() const;
  /// Hyperbolic arclength from p_minus to a point of the probe.
  double parameter(const Vec3& x) const;
};

/// `count` probes over a golden spiral inside the inscribed planar circle,
/// each certified with side_of against the equidistant leaves of the
/// inscribed and circumscribed round circles for every H in [H_lo, H_hi].
std::vector<ProbeLine> make_probes(const IdealCurve& curve, double H_lo, double H_hi, int count);

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // check-specific; positive is good
  std::map<std::string, double> params;
  std::string detail;
};

struct VerificationReport {
  std::string fingerprint;
  std::vector<CheckResult> checks;
  bool pass() const;
};

struct DisjointnessResult {
  std::vector<std::vector<double>> separation;  // symmetric, Euclidean ball distance
  std::vector<std::pair<int, int>> intersecting;
  double min_separation = 0.0;
  bool pass = false;
};
DisjointnessResult pairwise_disjoint(const LeafFamily& f);

struct ProbeCrossings {
  bool valid = false;
  bool monotone = false;
  std::vector<double> t;  // one per leaf when valid
};
struct ProbeResult {
  std::vector<ProbeCrossings> probes;
  int valid = 0;
  int violations = 0;
  double valid_fraction = 0.0;
  bool pass = false;
};
/// D+ grows with H, so crossing parameters must strictly decrease in H.
ProbeResult probe_monotone(const LeafFamily& f, const std::vector<ProbeLine>& probes, double min_valid = 0.9);

struct GapRow {
  double dH = 0.0;
  double displacement = 0.0;
};
struct GapResult {
  std::vector<GapRow> rows;
  bool pass = false;
};
/// Solves at H0 and H0 +- dH for every dH (largest first). Solver failures
/// propagate.
GapResult gap_scan(const IdealCurve& curve, double H0, std::vector<double> dH, const SolverConfig& cfg,
                   int probe_count = 40);

struct FillResult {
  double max_jump_ratio = 0.0;  // max over probes of jump / bound
  double coverage = 0.0;        // mean swept fraction between the barrier leaves
  bool span_ok = false;         // family reaches 0.9 of the solver cap on both sides
  bool pass = false;
};
/// Each jump between consecutive crossings is bounded by `slack` times the
/// exact equidistant spacing for the family's median H step.
FillResult fill_scan(const LeafFamily& f, const std::vector<ProbeLine>& probes, double h_cap = 0.95,
                     double slack = 1.5);

struct HullResult {
  std::vector<double> margin;  // per leaf
  double min_margin = 0.0;
  bool pass = false;
};
HullResult hull_containment(const LeafFamily& f, int budget, double tol = 1e-3);

/// Min Euclidean distance between the star-frame dilations of s by t and u.
double translate_disjointness(const DiscreteSurface& s, const IdealCurve& curve, double t, double u);

struct SlopeResult {
  double predicted = 0.0;
  double mean_measured = 0.0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
};
/// Normal drift per unit height between the collar ring and the adjacent
/// free vertices, against H / sqrt(1 - H^2).
SlopeResult boundary_slope_check(const DiscreteSurface& s, const IdealCurve& curve, double H);

/// Hyperbolic area of s inside the geodesic ball of radius R about `center`
/// (triangles refined against the sphere), over 4 pi sinh^2 R.
double area_ratio_in_ball(const DiscreteSurface& s, const Vec3& center, double R);

struct VerifyOptions {
  int probes = 200;
  double min_valid = 0.9;
  int hull_budget = 256;
  double hull_tol = 1e-3;
  double fill_slack = 1.5;
  double h_cap = 0.95;
  std::vector<double> radii{1.0, 2.0, 3.0};
  double dilation_t = 1.1, dilation_s = 1.3;
  bool disjoint = true, monotone = true, fill = true, hull = true, translate = true, area = true, slope = false;
  double slope_tol = 0.1;
};

VerificationReport verify_family(const LeafFamily& f, const VerifyOptions& opt, const std::string& fingerprint);

}  // namespace cmcfol
