#include "cmcfol/solver.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>

namespace cmcfol {

void SolverConfig::validate() const {
  auto need = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  need(eps > 0.0 && eps <= 0.05, "solver.eps must lie in (0, 0.05]");
  need(resolution >= 200, "solver.resolution below 200 vertices");
  need(max_iterations >= 1, "solver.max_iterations must be >= 1");
  need(tolerance > 0.0, "solver.tolerance must be positive");
  need(initial_step > 0.0, "solver.initial_step must be positive");
  need(shrink > 0.0 && shrink < 1.0, "solver.shrink must lie in (0, 1)");
  need(armijo > 0.0 && armijo <= 0.5, "solver.armijo must lie in (0, 0.5]");
  need(max_displacement > 0.0, "solver.max_displacement must be positive");
  need(h_cap > 0.0 && h_cap < 1.0, "solver.h_cap must lie in (0, 1)");
}

ReferenceSurface cone_reference(const DiscreteSurface& s, const Vec3& apex) {
  const int m = static_cast<int>(s.boundary.size());
  if (m < 3) throw std::invalid_argument("reference cone needs a boundary ring");
  // Direction in which s traverses its ring.
  const int b0 = s.boundary[0], b1 = s.boundary[1];
  bool forward = false, found = false;
  for (const auto& t : s.triangles) {
    for (int k = 0; k < 3 && !found; ++k) {
      if (t[k] == b0 && t[(k + 1) % 3] == b1) forward = found = true;
      if (t[k] == b1 && t[(k + 1) % 3] == b0) found = true;
    }
    if (found) break;
  }
  if (!found) throw std::invalid_argument("boundary ring is not an edge cycle of the surface");
  ReferenceSurface ref;
  for (int v : s.boundary) ref.vertices.push_back(s.vertices[v]);
  ref.vertices.push_back(apex);
  for (int i = 0; i < m; ++i) {
    ref.boundary.push_back(i);
    const int j = (i + 1) % m;
    ref.triangles.push_back(forward ? Tri{m, i, j} : Tri{m, j, i});
  }
  return ref;
}

Vec3 hull_interior_point(const IdealCurve& curve) {
  return curve.frame().from_half(Vec3(0, 0, best_fit_planar_radius(curve)));
}

namespace {

void check_reference(const DiscreteSurface& s, const ReferenceSurface& m) {
  if (m.boundary.size() != s.boundary.size()) throw std::invalid_argument("reference boundary size mismatch");
  for (std::size_t i = 0; i < s.boundary.size(); ++i) {
    if ((m.vertices[m.boundary[i]] - s.vertices[s.boundary[i]]).norm() > 1e-12) {
      throw std::invalid_argument("reference surface does not share the boundary ring");
    }
  }
}

}  // namespace

EnergyBreakdown energy(const DiscreteSurface& s, double H, const ReferenceSurface& m) {
  check_reference(s, m);
  const SurfaceTerms ts = kernels::evaluate_serial(s.vertices, s.triangles, false);
  const SurfaceTerms tm = kernels::evaluate_serial(m.vertices, m.triangles, false);
  EnergyBreakdown e;
  e.A = ts.A;
  e.V = ts.Phi - tm.Phi;
  e.I = e.A + 2.0 * H * e.V;
  return e;
}

std::vector<Vec3> energy_gradient(const DiscreteSurface& s, double H, const ReferenceSurface& m) {
  check_reference(s, m);
  const SurfaceTerms ts = kernels::evaluate_omp(s.vertices, s.triangles, make_incidence(s), true);
  std::vector<Vec3> g(s.vertices.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = ts.gA[i] + 2.0 * H * ts.gPhi[i];
  for (int v : s.boundary) g[v].setZero();
  return g;
}

std::vector<double> vertex_areas(const DiscreteSurface& s) {
  std::vector<double> a(s.vertices.size(), 0.0);
  for (const auto& t : s.triangles) {
    const double area = triangle_hyp_area(s.vertices[t[0]], s.vertices[t[1]], s.vertices[t[2]]) / 3.0;
    for (int v : t) a[v] += area;
  }
  return a;
}

std::vector<Vec3> vertex_normals(const DiscreteSurface& s) {
  std::vector<Vec3> n(s.vertices.size(), Vec3::Zero());
  for (const auto& t : s.triangles) {
    const Vec3 e = (s.vertices[t[1]] - s.vertices[t[0]]).cross(s.vertices[t[2]] - s.vertices[t[0]]);
    for (int v : t) n[v] += e;
  }
  for (auto& v : n) {
    const double l = v.norm();
    if (l > 0) v /= l;
  }
  return n;
}

namespace {

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  const std::size_t k = static_cast<std::size_t>(std::floor(q * (v.size() - 1) + 0.5));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

ResidualStats residual_from(const DiscreteSurface& s, double H, const SurfaceTerms& terms) {
  const auto areas = vertex_areas(s);
  const auto normals = vertex_normals(s);
  const auto mask = s.pinned_mask();
  ResidualStats out;
  std::vector<double> mags;
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    if (mask[i]) continue;
    const double lam = 2.0 / (1.0 - s.vertices[i].squaredNorm());
    const double r = (terms.gA[i] + 2.0 * H * terms.gPhi[i]).dot(normals[i]) / (2.0 * lam * areas[i]);
    out.per_vertex.push_back(r);
    mags.push_back(std::abs(r));
  }
  out.median = percentile(mags, 0.5);
  out.p90 = percentile(mags, 0.9);
  out.max = mags.empty() ? 0.0 : *std::max_element(mags.begin(), mags.end());
  return out;
}

double min_triangle_area(const DiscreteSurface& s) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : s.triangles) {
    m = std::min(m, triangle_hyp_area(s.vertices[t[0]], s.vertices[t[1]], s.vertices[t[2]]));
  }
  return m;
}

void check_H(double H, const SolverConfig& cfg) {
  if (!(std::abs(H) < 1.0)) {
    throw std::invalid_argument("|H| < 1 is required: no CMC surface with |H| >= 1 has a curve as ideal boundary");
  }
  if (std::abs(H) > cfg.h_cap) {
    std::ostringstream msg;
    msg << "|H| = " << std::abs(H) << " exceeds the solver cap " << cfg.h_cap
        << "; leaves degenerate toward the horosphere barrier";
    throw std::invalid_argument(msg.str());
  }
}

void replace_ring(const IdealCurve& curve, DiscreteSurface& s, double H) {
  const auto ring = collar_ring(curve, H, s.eps, static_cast<int>(s.boundary.size()));
  for (std::size_t i = 0; i < ring.size(); ++i) s.vertices[s.boundary[i]] = ring[i].coords();
}

}  // namespace

ResidualStats mean_curvature_residual(const DiscreteSurface& s, double H) {
  const SurfaceTerms terms = kernels::evaluate_omp(s.vertices, s.triangles, make_incidence(s), true);
  return residual_from(s, H, terms);
}

DiscreteSurface predict_leaf(const IdealCurve& curve, const DiscreteSurface& from, double H_new) {
  DiscreteSurface s = from;
  const double shift = -(std::atanh(H_new) - std::atanh(from.H));
  const auto normals = vertex_normals(from);
  const auto mask = from.pinned_mask();
  const Frame& frame = curve.frame();
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    if (mask[i]) continue;
    const double lam = 2.0 / (1.0 - from.vertices[i].squaredNorm());
    s.vertices[i] += shift / lam * normals[i];
    // Near the ring the shifted rows lag the new ring; pull them onto the
    // collar model for H_new as the cold template does.
    const Vec3 y0 = frame.to_half(from.vertices[i]);
    if (y0.z() < kCollarBlend) {
      const double t = std::clamp((kCollarBlend - y0.z()) / (kCollarBlend - from.eps), 0.0, 1.0);
      const double w = t * t * (3.0 - 2.0 * t);
      const double phi = std::atan2(y0.y(), y0.x());
      const double h = std::max(y0.z(), from.eps);
      const double rad = collar_radius(curve, H_new, h, phi);
      const Vec3 yc(rad * std::cos(phi), rad * std::sin(phi), y0.z());
      s.vertices[i] = frame.from_half((1.0 - w) * frame.to_half(s.vertices[i]) + w * yc);
    }
  }
  s.H = H_new;
  s.provenance = Provenance::Initial;
  replace_ring(curve, s, H_new);
  return s;
}

namespace {

// Sobolev metric L + 2M on normal speeds of the free vertices: L is the
// cotangent Laplacian (conformally invariant, so the Euclidean one serves)
// with obtuse weights clamped to zero, M the lumped hyperbolic area. It
// matches the Jacobi operator -Laplacian + 2 - |A|^2 up to the |A|^2 term.
class SobolevMetric {
 public:
  SobolevMetric(const DiscreteSurface& s, const std::vector<char>& mask) : tris_(s.triangles) {
    index_.assign(mask.size(), -1);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) index_[i] = free_++;
    }
  }

  void update(const std::vector<Vec3>& x, const std::vector<double>& area) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(9 * tris_.size() + free_);
    for (std::size_t i = 0; i < index_.size(); ++i) {
      if (index_[i] >= 0) t.emplace_back(index_[i], index_[i], 2.0 * area[i]);
    }
    for (const Tri& tri : tris_) {
      for (int k = 0; k < 3; ++k) {
        const int o = tri[k], a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
        const Vec3 u = x[a] - x[o], v = x[b] - x[o];
        const double w = 0.5 * std::max(0.0, u.dot(v) / u.cross(v).norm());
        const int ia = index_[a], ib = index_[b];
        if (ia >= 0) t.emplace_back(ia, ia, w);
        if (ib >= 0) t.emplace_back(ib, ib, w);
        if (ia >= 0 && ib >= 0) {
          t.emplace_back(ia, ib, -w);
          t.emplace_back(ib, ia, -w);
        }
      }
    }
    P_.resize(free_, free_);
    P_.setFromTriplets(t.begin(), t.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(P_);
      analyzed_ = true;
    }
    ldlt_.factorize(P_);
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("Sobolev metric factorization failed");
  }

  /// phi = P^{-1} b on free vertices; pinned entries stay zero.
  std::vector<double> solve(const std::vector<double>& b) const {
    Eigen::VectorXd r(free_);
    for (std::size_t i = 0; i < index_.size(); ++i) {
      if (index_[i] >= 0) r[index_[i]] = b[i];
    }
    const Eigen::VectorXd z = ldlt_.solve(r);
    std::vector<double> out(index_.size(), 0.0);
    for (std::size_t i = 0; i < index_.size(); ++i) {
      if (index_[i] >= 0) out[i] = z[index_[i]];
    }
    return out;
  }

  double inner(const std::vector<double>& a) const {
    Eigen::VectorXd r(free_);
    for (std::size_t i = 0; i < index_.size(); ++i) {
      if (index_[i] >= 0) r[index_[i]] = a[i];
    }
    return r.dot(P_ * r);
  }

 private:
  const std::vector<Tri>& tris_;
  std::vector<int> index_;
  int free_ = 0;
  Eigen::SparseMatrix<double> P_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
};

}  // namespace

SolveResult solve(const IdealCurve& curve, double H, const SolverConfig& cfg, const DiscreteSurface* warm_start) {
  cfg.validate();
  check_H(H, cfg);
  if (!is_star_shaped(curve).star) throw std::invalid_argument("curve is not star-shaped about its center");

  DiscreteSurface s;
  if (warm_start) {
    s = *warm_start;
    s.H = H;
    replace_ring(curve, s, H);
  } else {
    s = build_initial_mesh(curve, H, cfg.eps, cfg.resolution);
  }
  const Incidence inc = make_incidence(s);
  const auto mask = s.pinned_mask();
  const std::size_t n = s.vertices.size();
  const double guard = 1.0 - 0.25 * s.eps;

  SolveReport report;
  auto eval = [&](const std::vector<Vec3>& x, std::vector<Vec3>& g, double& f) {
    for (const auto& v : x) {
      if (!(v.norm() <= guard)) return false;
    }
    const SurfaceTerms t = kernels::evaluate_omp(x, s.triangles, inc, true);
    f = t.A + 2.0 * H * t.Phi;
    g.resize(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = mask[i] ? Vec3::Zero() : Vec3(t.gA[i] + 2.0 * H * t.gPhi[i]);
    return std::isfinite(f);
  };

  std::vector<Vec3> x = s.vertices, g, x_new(n), g_new, d(n), step(n);
  double f = 0.0;
  if (!eval(x, g, f)) throw std::invalid_argument("initial surface is outside the admissible region");
  SobolevMetric metric(s, mask);
  std::vector<double> b(n), psi(n);
  double alpha = cfg.initial_step;
  bool have_prev = false;
  std::vector<Vec3> gp(n), gp_prev(n);

  auto fail = [&](const std::string& why) {
    s.vertices = x;
    report.residual = mean_curvature_residual(s, H);
    report.energy = energy(s, H, cone_reference(s, hull_interior_point(curve)));
    report.min_triangle_area = min_triangle_area(s);
    report.message = why;
    throw SolverFailure(why, report, s);
  };

  for (int it = 0;; ++it) {
    s.vertices = x;
    const auto areas = vertex_areas(s);
    const auto normals = vertex_normals(s);
    double total_area = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lam = 2.0 / (1.0 - x[i].squaredNorm());
      total_area += areas[i];
      // b: derivative of I along a unit-speed hyperbolic normal motion.
      b[i] = mask[i] ? 0.0 : g[i].dot(normals[i]) / lam;
      gp[i] = b[i] * lam * normals[i];
      if (!mask[i]) norm2 += b[i] * b[i] / areas[i];
    }
    report.grad_norm = std::sqrt(norm2 / total_area);
    report.iterations = it;
    if (report.grad_norm < cfg.tolerance) {
      report.converged = true;
      break;
    }
    if (it >= cfg.max_iterations) {
      std::ostringstream msg;
      msg << "no convergence after " << it << " iterations (gradient norm " << report.grad_norm << ")";
      fail(msg.str());
    }

    metric.update(x, areas);
    const std::vector<double> phi = metric.solve(b);
    double slope = 0.0, maxdisp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lam = 2.0 / (1.0 - x[i].squaredNorm());
      d[i] = -phi[i] / lam * normals[i];
      slope -= b[i] * phi[i];
      maxdisp = std::max(maxdisp, std::abs(phi[i]));
    }
    if (have_prev) {
      // Barzilai-Borwein in the Sobolev metric.
      double sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double lam = 2.0 / (1.0 - x[i].squaredNorm());
        psi[i] = mask[i] ? 0.0 : lam * step[i].dot(normals[i]);
        sy += step[i].dot(gp[i] - gp_prev[i]);
      }
      const double sps = metric.inner(psi);
      alpha = sy > 0.0 ? sps / sy : 2.0 * alpha;
    }
    if (alpha * maxdisp > cfg.max_displacement) alpha = cfg.max_displacement / maxdisp;

    bool accepted = false;
    double f_new = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + alpha * d[i];
      if (eval(x_new, g_new, f_new) && f_new <= f + cfg.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= cfg.shrink;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "line search stalled at iteration " << it << " (gradient norm " << report.grad_norm << ")";
      fail(msg.str());
    }
    for (std::size_t i = 0; i < n; ++i) step[i] = x_new[i] - x[i];
    gp_prev = gp;
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    have_prev = true;
    report.energy_trace.push_back(f);

    s.vertices = x;
    const double amin = min_triangle_area(s);
    if (amin < 1e-12) {
      std::ostringstream msg;
      msg << "mesh collapse at iteration " << it << " (triangle hyperbolic area " << amin << ")";
      fail(msg.str());
    }
  }

  s.vertices = x;
  s.provenance = Provenance::Solved;
  // The trace is stored relative to the default reference cone.
  const ReferenceSurface ref = cone_reference(s, hull_interior_point(curve));
  report.energy = energy(s, H, ref);
  const double shift = report.energy.I - f;
  for (double& v : report.energy_trace) v += shift;
  report.residual = mean_curvature_residual(s, H);
  report.min_triangle_area = min_triangle_area(s);
  report.message = "converged";
  return {std::move(s), std::move(report)};
}

constexpr int kWarmBudget = 300;

LeafFamily sweep(const IdealCurve& curve, const std::vector<double>& grid, const SolverConfig& cfg, int jobs) {
  cfg.validate();
  if (grid.empty()) throw std::invalid_argument("empty H grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_H(grid[i], cfg);
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("H grid must be strictly increasing");
  }
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  const int n = static_cast<int>(grid.size());
  std::vector<std::optional<SolveResult>> results(n);

  auto family_of = [&]() {
    LeafFamily fam{curve, {}, {}, {}};
    for (int i = 0; i < n; ++i) {
      if (!results[i]) continue;
      fam.H.push_back(grid[i]);
      fam.leaves.push_back(results[i]->surface);
      fam.reports.push_back(results[i]->report);
    }
    return fam;
  };

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(grid[a]) < std::abs(grid[b]) || (std::abs(grid[a]) == std::abs(grid[b]) && grid[a] < grid[b]);
  });
  const int root = order[0];

  if (jobs == 1) {
    for (int i : order) {
      try {
        if (i == root) {
          results[i] = solve(curve, grid[i], cfg);
        } else {
          const int from = i > root ? i - 1 : i + 1;
          const DiscreteSurface start = predict_leaf(curve, results[from]->surface, grid[i]);
          // The neighbor's vertex layout degrades far from the H it was graded
          // for; a stalled warm start is retried from the cold template.
          if (audit_mesh(start).inside_guard) {
            SolverConfig warm = cfg;
            warm.max_iterations = std::min(cfg.max_iterations, kWarmBudget);
            try {
              results[i] = solve(curve, grid[i], warm, &start);
            } catch (const SolverFailure&) {
            }
          }
          if (!results[i]) results[i] = solve(curve, grid[i], cfg);
        }
      } catch (const SolverFailure& e) {
        throw SweepFailure(e.what(), family_of(), grid[i], e.report());
      }
    }
    return family_of();
  }

  std::vector<std::optional<SolverFailure>> failures(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int k = 0; k < n; ++k) {
    try {
      results[k] = solve(curve, grid[k], cfg);
    } catch (const SolverFailure& e) {
      failures[k] = e;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (int i : order) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    if (failures[i]) throw SweepFailure(failures[i]->what(), family_of(), grid[i], failures[i]->report());
  }
  return family_of();
}

}  // namespace cmcfol
