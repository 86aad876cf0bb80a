#include "cmcfol/verifier.hpp"

#include "cmcfol/spatial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cmcfol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGolden = 2.399963229728653;  // pi (3 - sqrt 5)

struct Radii {
  double lo = 1e300, hi = 0.0;
};

Radii planar_radii(const IdealCurve& curve) {
  Radii r;
  for (int i = 0; i < 1440; ++i) {
    const double v = curve.planar_radius(2.0 * kPi * i / 1440);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  return r;
}

// Round leaf of planar radius r in the star frame at horizontal distance w.
double cap_height(double r, double H_eff, double w) {
  const double q = std::sqrt(1.0 - H_eff * H_eff);
  const double R = r / q, zc = H_eff * r / q;
  return zc + std::sqrt(std::max(0.0, R * R - w * w));
}

std::vector<CanonicalLeaf> bracket_leaves(const IdealCurve& curve, double H) {
  const Radii r = planar_radii(curve);
  const CapSide side = curve.center_positive() ? CapSide::Inside : CapSide::Outside;
  const Vec3 axis = curve.center().dir();
  return {equidistant_leaf(IdealCircle(axis, 2.0 * std::atan(r.lo)), H, side),
          equidistant_leaf(IdealCircle(axis, 2.0 * std::atan(r.hi)), H, side)};
}

Vec3 probe_point(const ProbeLine& p, double s) {
  const Vec3 y = mobius_translate(p.p_minus, p.p_plus);
  const double n = y.norm();
  if (n == 0.0) return p.p_minus;
  return mobius_translate(-p.p_minus, std::tanh(0.5 * s) * y / n);
}

// Hyperbolic parameter where a canonical leaf crosses the probe, or -1.
double leaf_crossing(const ProbeLine& p, const CanonicalLeaf& leaf) {
  const auto pts = p.polyline();
  const double h = p.length / p.segments;
  for (int k = 0; k < p.segments; ++k) {
    const double f0 = leaf.carrier.eval(pts[k]), f1 = leaf.carrier.eval(pts[k + 1]);
    if ((f0 < 0) == (f1 < 0)) continue;
    double lo = k * h, hi = (k + 1) * h;
    const bool neg_lo = f0 < 0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((leaf.carrier.eval(probe_point(p, mid)) < 0) == neg_lo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  return -1.0;
}

std::vector<TriangleTree> make_trees(const LeafFamily& f) {
  std::vector<TriangleTree> trees;
  trees.reserve(f.size());
  for (const auto& leaf : f.leaves) trees.emplace_back(leaf);
  return trees;
}

// Crossing parameters of one probe against every leaf.
ProbeCrossings cross_probe(const ProbeLine& probe, const std::vector<TriangleTree>& trees) {
  ProbeCrossings out;
  const auto pts = probe.polyline();
  out.valid = true;
  for (const auto& tree : trees) {
    std::vector<Vec3> hits;
    for (int k = 0; k < probe.segments; ++k) {
      for (double t : tree.segment_hits(pts[k], pts[k + 1])) {
        const Vec3 x = pts[k] + t * (pts[k + 1] - pts[k]);
        // A segment through a shared edge or vertex reports several triangles.
        bool dup = false;
        for (const auto& y : hits) dup = dup || (x - y).norm() < 1e-10;
        if (!dup) hits.push_back(x);
      }
    }
    if (hits.size() != 1) {
      out.valid = false;
      out.t.clear();
      return out;
    }
    out.t.push_back(probe.parameter(hits[0]));
  }
  out.monotone = true;
  for (std::size_t i = 1; i < out.t.size(); ++i) out.monotone = out.monotone && out.t[i] < out.t[i - 1];
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<Vec3> ProbeLine::polyline() const {
  std::vector<Vec3> pts(segments + 1);
  for (int k = 0; k <= segments; ++k) pts[k] = probe_point(*this, length * k / segments);
  pts.back() = p_plus;
  return pts;
}

double ProbeLine::parameter(const Vec3& x) const { return hyp_distance(p_minus, x); }

std::vector<ProbeLine> make_probes(const IdealCurve& curve, double H_lo, double H_hi, int count) {
  if (count < 0) throw std::invalid_argument("probe count must be >= 0");
  if (!(H_lo <= H_hi) || !(std::abs(H_lo) < 1.0) || !(std::abs(H_hi) < 1.0)) {
    throw std::invalid_argument("probe H range must satisfy -1 < H_lo <= H_hi < 1");
  }
  const Radii r = planar_radii(curve);
  const Frame& frame = curve.frame();
  const double sgn = curve.orientation_sign();
  std::vector<double> Hs;
  for (int i = 0; i <= 40; ++i) Hs.push_back(H_lo + (H_hi - H_lo) * i / 40.0);
  std::vector<std::vector<CanonicalLeaf>> brackets;
  for (double H : Hs) brackets.push_back(bracket_leaves(curve, H));

  std::vector<ProbeLine> probes;
  for (int i = 0; static_cast<int>(probes.size()) < count && i < 4 * count; ++i) {
    const double w = 0.6 * r.lo * std::sqrt((i + 0.5) / count);
    const Vec2 xy = w * Vec2(std::cos(kGolden * i), std::sin(kGolden * i));
    double lo = 1e300, hi = 0.0;
    for (double H : Hs) {
      for (double rr : {r.lo, r.hi}) {
        const double y = cap_height(rr, sgn * H, w);
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
    }
    const Vec3 low = frame.from_half(Vec3(xy.x(), xy.y(), 0.25 * lo));
    const Vec3 high = frame.from_half(Vec3(xy.x(), xy.y(), 4.0 * hi));
    ProbeLine p;
    // Omega+ is the bounded planar region when the center is positive.
    p.p_plus = curve.center_positive() ? low : high;
    p.p_minus = curve.center_positive() ? high : low;
    if (std::max(p.p_plus.norm(), p.p_minus.norm()) > 1.0 - 1e-9) continue;
    bool ok = true;
    for (const auto& pair : brackets) {
      for (const auto& leaf : pair) {
        ok = ok && side_of(leaf, BallPoint(p.p_plus)) == Side::Positive &&
             side_of(leaf, BallPoint(p.p_minus)) == Side::Negative;
      }
    }
    if (!ok) continue;
    p.length = hyp_distance(p.p_minus, p.p_plus);
    probes.push_back(p);
  }
  return probes;
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

DisjointnessResult pairwise_disjoint(const LeafFamily& f) {
  DisjointnessResult r;
  const int n = static_cast<int>(f.size());
  r.separation.assign(n, std::vector<double>(n, 0.0));
  r.pass = true;
  r.min_separation = n > 1 ? 1e300 : 0.0;
  if (n < 2) return r;
  const auto trees = make_trees(f);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  }
  std::vector<char> hit(pairs.size(), 0);
  std::vector<double> sep(pairs.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    hit[k] = trees[i].first_intersection(trees[j]).first >= 0;
    sep[k] = hit[k] ? 0.0 : mesh_distance(trees[i], trees[j]);
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    r.separation[i][j] = r.separation[j][i] = sep[k];
    r.min_separation = std::min(r.min_separation, sep[k]);
    if (hit[k]) r.intersecting.push_back(pairs[k]);
  }
  r.pass = r.intersecting.empty() && r.min_separation > 0.0;
  return r;
}

ProbeResult probe_monotone(const LeafFamily& f, const std::vector<ProbeLine>& probes, double min_valid) {
  ProbeResult r;
  const auto trees = make_trees(f);
  r.probes.resize(probes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < probes.size(); ++k) r.probes[k] = cross_probe(probes[k], trees);
  for (const auto& p : r.probes) {
    if (!p.valid) continue;
    ++r.valid;
    if (!p.monotone) ++r.violations;
  }
  r.valid_fraction = probes.empty() ? 0.0 : static_cast<double>(r.valid) / probes.size();
  r.pass = r.valid_fraction >= min_valid && r.violations == 0;
  return r;
}

GapResult gap_scan(const IdealCurve& curve, double H0, std::vector<double> dH, const SolverConfig& cfg,
                   int probe_count) {
  for (double d : dH) {
    if (!(d >= 0.0)) throw std::invalid_argument("gap_scan steps must be >= 0");
  }
  std::sort(dH.begin(), dH.end(), std::greater<>());
  GapResult r;
  if (dH.empty()) return r;
  const double span = dH.front();
  const auto probes = make_probes(curve, H0 - span, H0 + span, probe_count);
  const SolveResult center = solve(curve, H0, cfg);
  const TriangleTree center_tree(center.surface);
  std::vector<TriangleTree> base{center_tree};
  std::vector<ProbeCrossings> c0;
  for (const auto& p : probes) c0.push_back(cross_probe(p, base));

  for (double d : dH) {
    GapRow row{d, 0.0};
    if (d > 0.0) {
      for (double sgn : {-1.0, 1.0}) {
        const SolveResult s = solve(curve, H0 + sgn * d, cfg, &center.surface);
        const std::vector<TriangleTree> tree{TriangleTree(s.surface)};
        for (std::size_t k = 0; k < probes.size(); ++k) {
          if (!c0[k].valid) continue;
          const auto c = cross_probe(probes[k], tree);
          if (c.valid) row.displacement = std::max(row.displacement, std::abs(c.t[0] - c0[k].t[0]));
        }
      }
    }
    r.rows.push_back(row);
  }
  r.pass = true;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const double a = r.rows[i - 1].displacement, b = r.rows[i].displacement;
    if (!(b < a) || !(b <= 0.8 * a)) r.pass = false;
  }
  return r;
}

FillResult fill_scan(const LeafFamily& f, const std::vector<ProbeLine>& probes, double h_cap, double slack) {
  FillResult r;
  r.pass = true;
  if (f.size() == 0) return r;
  r.span_ok = f.H.front() <= -0.9 * h_cap && f.H.back() >= 0.9 * h_cap;
  if (f.size() < 2) return r;
  std::vector<double> steps;
  for (std::size_t i = 1; i < f.H.size(); ++i) steps.push_back(f.H[i] - f.H[i - 1]);
  const double h = median(steps);
  const auto pr = probe_monotone(f, probes, 0.0);
  const auto lower = bracket_leaves(f.curve, -h_cap), upper = bracket_leaves(f.curve, h_cap);
  double cov_sum = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& c = pr.probes[k];
    if (!c.valid) continue;
    for (std::size_t i = 1; i < c.t.size(); ++i) {
      const double mid = 0.5 * (f.H[i] + f.H[i - 1]);
      const double lo = std::max(mid - 0.5 * h, -0.999999), hi = std::min(mid + 0.5 * h, 0.999999);
      const double bound = slack * (std::atanh(hi) - std::atanh(lo));
      r.max_jump_ratio = std::max(r.max_jump_ratio, std::abs(c.t[i] - c.t[i - 1]) / bound);
    }
    // Barrier window: from the +cap leaves (nearest p_minus) to the -cap leaves.
    double a = 1e300, b = -1e300;
    for (const auto& leaf : upper) {
      const double t = leaf_crossing(probes[k], leaf);
      if (t >= 0) a = std::min(a, t);
    }
    for (const auto& leaf : lower) {
      const double t = leaf_crossing(probes[k], leaf);
      if (t >= 0) b = std::max(b, t);
    }
    if (b > a) {
      const double swept = *std::max_element(c.t.begin(), c.t.end()) - *std::min_element(c.t.begin(), c.t.end());
      cov_sum += std::min(1.0, swept / (b - a));
      ++used;
    }
  }
  r.coverage = used ? cov_sum / used : 0.0;
  r.pass = pr.valid > 0 && r.max_jump_ratio <= 1.0;
  return r;
}

HullResult hull_containment(const LeafFamily& f, int budget, double tol) {
  HullResult r;
  const SampledCurve sc = sampled(f.curve, 512);
  r.margin.resize(f.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < f.size(); ++i) {
    const ShiftedHull hull(sc, f.H[i], budget);
    double m = 1e300;
    for (const auto& v : f.leaves[i].vertices) m = std::min(m, hull.margin(v));
    r.margin[i] = m;
  }
  r.min_margin = r.margin.empty() ? 0.0 : *std::min_element(r.margin.begin(), r.margin.end());
  r.pass = r.min_margin >= -tol;
  return r;
}

double translate_disjointness(const DiscreteSurface& s, const IdealCurve& curve, double t, double u) {
  if (!(t > 0.0) || !(u > 0.0)) throw std::invalid_argument("dilation parameters must be positive");
  if (t == u) throw std::invalid_argument("translate_disjointness needs t != s");
  const Frame& frame = curve.frame();
  auto dilate = [&](double k) {
    DiscreteSurface d = s;
    for (auto& v : d.vertices) v = frame.from_half(k * frame.to_half(v));
    return d;
  };
  const DiscreteSurface a = dilate(t), b = dilate(u);
  const TriangleTree ta(a), tb(b);
  if (ta.first_intersection(tb).first >= 0) return 0.0;
  return mesh_distance(ta, tb);
}

SlopeResult boundary_slope_check(const DiscreteSurface& s, const IdealCurve& curve, double H) {
  if (!(std::abs(H) < 1.0)) throw std::invalid_argument("|H| < 1 required");
  SlopeResult r;
  r.predicted = curve.orientation_sign() * H / std::sqrt(1.0 - H * H);
  const Frame& frame = curve.frame();
  const auto pinned = s.pinned_mask();
  const std::size_t n = s.vertices.size();
  std::vector<std::vector<int>> nbr(n);
  for (const auto& t : s.triangles) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a != b) nbr[t[a]].push_back(t[b]);
      }
    }
  }
  for (auto& v : nbr) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  // Outward normal offset from the planar curve and height, star frame.
  auto offset = [&](int i) {
    const Vec3 y = frame.to_half(s.vertices[i]);
    const double th = std::atan2(y.y(), y.x());
    const double rr = curve.planar_radius(th), dr = curve.planar_radius_derivative(th);
    return Vec2((std::hypot(y.x(), y.y()) - rr) * rr / std::hypot(rr, dr), y.z());
  };
  double sum = 0.0;
  for (int b : s.boundary) {
    // Two rings of free vertices around the collar vertex.
    std::vector<int> pts{b};
    for (int v : nbr[b]) {
      if (!pinned[v]) pts.push_back(v);
    }
    const std::size_t ring1 = pts.size();
    for (std::size_t k = 1; k < ring1; ++k) {
      for (int v : nbr[pts[k]]) {
        if (!pinned[v] && std::find(pts.begin(), pts.end(), v) == pts.end()) pts.push_back(v);
      }
    }
    // d = s y + c y^2 through the ideal boundary point.
    Eigen::MatrixXd A(pts.size(), 2);
    Eigen::VectorXd rhs(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Vec2 o = offset(pts[k]);
      A(k, 0) = o.y();
      A(k, 1) = o.y() * o.y();
      rhs[k] = o.x();
    }
    const double slope = A.colPivHouseholderQr().solve(rhs)[0];
    sum += slope;
    const double err = std::abs(slope - r.predicted);
    r.max_abs_error = std::max(r.max_abs_error, err);
    r.max_rel_error = std::max(r.max_rel_error, r.predicted != 0.0 ? err / std::abs(r.predicted) : err);
  }
  r.mean_measured = s.boundary.empty() ? 0.0 : sum / s.boundary.size();
  return r;
}

namespace {

double clipped_area(const Vec3& a, const Vec3& b, const Vec3& c, double rad, int depth) {
  const int in = (a.norm() < rad) + (b.norm() < rad) + (c.norm() < rad);
  if (in == 3) return triangle_hyp_area(a, b, c);
  if (in == 0 && closest_point_on_triangle(Vec3::Zero(), a, b, c).norm() >= rad) return 0.0;
  if (depth == 0) return triangle_hyp_area(a, b, c) * in / 3.0;
  const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return clipped_area(a, ab, ca, rad, depth - 1) + clipped_area(ab, b, bc, rad, depth - 1) +
         clipped_area(ca, bc, c, rad, depth - 1) + clipped_area(ab, bc, ca, rad, depth - 1);
}

}  // namespace

double area_ratio_in_ball(const DiscreteSurface& s, const Vec3& center, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("ball radius must be positive");
  const double rad = std::tanh(0.5 * R);
  std::vector<Vec3> x(s.vertices.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = mobius_translate(center, s.vertices[i]);
  double area = 0.0;
  for (const auto& t : s.triangles) area += clipped_area(x[t[0]], x[t[1]], x[t[2]], rad, 6);
  const double sh = std::sinh(R);
  return area / (4.0 * kPi * sh * sh);
}

namespace {

CheckResult make_check(std::string name, bool pass, double margin) {
  CheckResult c;
  c.name = std::move(name);
  c.pass = pass;
  c.margin = margin;
  return c;
}

}  // namespace

VerificationReport verify_family(const LeafFamily& f, const VerifyOptions& opt, const std::string& fingerprint) {
  if (f.size() == 0) throw std::invalid_argument("family has no leaves");
  for (std::size_t i = 1; i < f.H.size(); ++i) {
    if (!(f.H[i] > f.H[i - 1])) throw std::invalid_argument("family H values must be strictly increasing");
  }
  VerificationReport rep;
  rep.fingerprint = fingerprint;
  std::vector<ProbeLine> probes;
  if (opt.monotone || opt.fill) probes = make_probes(f.curve, f.H.front(), f.H.back(), opt.probes);

  if (opt.disjoint) {
    const auto d = pairwise_disjoint(f);
    auto c = make_check("pairwise_disjoint", d.pass, d.min_separation);
    c.params["intersecting_pairs"] = static_cast<double>(d.intersecting.size());
    c.params["leaves"] = static_cast<double>(f.size());
    if (!d.intersecting.empty()) {
      std::ostringstream os;
      os << "leaves " << d.intersecting.front().first << " and " << d.intersecting.front().second << " intersect";
      c.detail = os.str();
    }
    rep.checks.push_back(c);
  }
  if (opt.monotone) {
    const auto p = probe_monotone(f, probes, opt.min_valid);
    auto c = make_check("probe_monotone", p.pass, p.valid_fraction - opt.min_valid);
    c.params["probes"] = static_cast<double>(probes.size());
    c.params["valid"] = p.valid;
    c.params["violations"] = p.violations;
    c.params["valid_fraction"] = p.valid_fraction;
    rep.checks.push_back(c);
  }
  if (opt.fill) {
    const auto fl = fill_scan(f, probes, opt.h_cap, opt.fill_slack);
    auto c = make_check("fill_scan", fl.pass, 1.0 - fl.max_jump_ratio);
    c.params["max_jump_ratio"] = fl.max_jump_ratio;
    c.params["coverage"] = fl.coverage;
    c.params["span_ok"] = fl.span_ok;
    c.params["slack"] = opt.fill_slack;
    rep.checks.push_back(c);
  }
  if (opt.hull) {
    const auto h = hull_containment(f, opt.hull_budget, opt.hull_tol);
    auto c = make_check("hull_containment", h.pass, h.min_margin + opt.hull_tol);
    c.params["min_margin"] = h.min_margin;
    c.params["budget"] = opt.hull_budget;
    rep.checks.push_back(c);
  }
  if (opt.translate) {
    const auto& leaf = f.leaves[f.size() / 2];
    const double d = translate_disjointness(leaf, f.curve, opt.dilation_t, opt.dilation_s);
    auto c = make_check("translate_disjointness", d > 0.0, d);
    c.params["H"] = f.H[f.size() / 2];
    c.params["t"] = opt.dilation_t;
    c.params["s"] = opt.dilation_s;
    rep.checks.push_back(c);
  }
  if (opt.area) {
    const Vec3 center = hull_interior_point(f.curve);
    double worst = 0.0;
    for (const auto& leaf : f.leaves) {
      for (double R : opt.radii) worst = std::max(worst, area_ratio_in_ball(leaf, center, R));
    }
    auto c = make_check("area_bound", worst < 1.0, 1.0 - worst);
    c.params["max_ratio"] = worst;
    rep.checks.push_back(c);
  }
  if (opt.slope) {
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto s = boundary_slope_check(f.leaves[i], f.curve, f.H[i]);
      worst = std::max(worst, std::abs(f.H[i]) < 1e-12 ? s.max_abs_error : s.max_rel_error);
    }
    auto c = make_check("boundary_slope", worst < opt.slope_tol, opt.slope_tol - worst);
    c.params["max_error"] = worst;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace cmcfol
