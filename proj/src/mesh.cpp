#include "cmcfol/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace cmcfol {

std::vector<char> DiscreteSurface::pinned_mask() const {
  std::vector<char> mask(vertices.size(), 0);
  for (int v : boundary) mask[v] = 1;
  return mask;
}

Incidence make_incidence(const DiscreteSurface& s) {
  const int n = static_cast<int>(s.vertices.size());
  Incidence inc;
  inc.offset.assign(n + 1, 0);
  for (const auto& t : s.triangles) {
    for (int v : t) ++inc.offset[v + 1];
  }
  for (int i = 0; i < n; ++i) inc.offset[i + 1] += inc.offset[i];
  inc.tri.resize(inc.offset[n]);
  inc.corner.resize(inc.offset[n]);
  std::vector<int> fill(inc.offset.begin(), inc.offset.end() - 1);
  for (int t = 0; t < static_cast<int>(s.triangles.size()); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int slot = fill[s.triangles[t][k]]++;
      inc.tri[slot] = t;
      inc.corner[slot] = k;
    }
  }
  return inc;
}

double triangle_hyp_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  auto lam2 = [](const Vec3& x) {
    const double l = 2.0 / (1.0 - x.squaredNorm());
    return l * l;
  };
  const double e = 0.5 * (b - a).cross(c - a).norm();
  return e * (lam2(0.5 * (a + b)) + lam2(0.5 * (b + c)) + lam2(0.5 * (c + a))) / 3.0;
}

MeshAudit audit_mesh(const DiscreteSurface& s) {
  MeshAudit out;
  const int nv = static_cast<int>(s.vertices.size());
  std::vector<std::pair<int, int>> directed;
  directed.reserve(3 * s.triangles.size());
  double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
  for (const auto& t : s.triangles) {
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) return out;
      directed.emplace_back(t[k], t[(k + 1) % 3]);
    }
    const double a = triangle_hyp_area(s.vertices[t[0]], s.vertices[t[1]], s.vertices[t[2]]);
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }
  out.area_ratio = amin > 0 ? amax / amin : std::numeric_limits<double>::infinity();

  std::sort(directed.begin(), directed.end());
  out.consistent_winding = std::adjacent_find(directed.begin(), directed.end()) == directed.end();

  std::vector<std::pair<int, int>> undirected;
  undirected.reserve(directed.size());
  for (auto [a, b] : directed) undirected.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(undirected.begin(), undirected.end());
  std::vector<std::pair<int, int>> boundary_edges;  // as directed in the mesh
  int edges = 0;
  for (std::size_t i = 0; i < undirected.size();) {
    std::size_t j = i;
    while (j < undirected.size() && undirected[j] == undirected[i]) ++j;
    ++edges;
    if (j - i > 2) out.consistent_winding = false;
    if (j - i == 1) {
      const auto [a, b] = undirected[i];
      boundary_edges.push_back(std::binary_search(directed.begin(), directed.end(), std::make_pair(a, b))
                                   ? std::make_pair(a, b)
                                   : std::make_pair(b, a));
    }
    i = j;
  }
  out.euler = nv - edges + static_cast<int>(s.triangles.size());

  // The boundary edges must be exactly the ring's consecutive pairs, all
  // traversed in one direction.
  const int m = static_cast<int>(s.boundary.size());
  if (m >= 3 && static_cast<int>(boundary_edges.size()) == m) {
    std::sort(boundary_edges.begin(), boundary_edges.end());
    bool fwd = true, bwd = true;
    for (int i = 0; i < m; ++i) {
      const int a = s.boundary[i], b = s.boundary[(i + 1) % m];
      fwd = fwd && std::binary_search(boundary_edges.begin(), boundary_edges.end(), std::make_pair(a, b));
      bwd = bwd && std::binary_search(boundary_edges.begin(), boundary_edges.end(), std::make_pair(b, a));
    }
    out.boundary_matches = fwd || bwd;
  }

  out.inside_guard = true;
  for (const auto& v : s.vertices) {
    if (v.norm() > 1.0 - 0.25 * s.eps) out.inside_guard = false;
  }
  return out;
}

double best_fit_planar_radius(const IdealCurve& curve) {
  const int n = 1024;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += curve.planar_radius(2.0 * std::numbers::pi * i / n);
  return sum / n;
}

CanonicalLeaf template_leaf(const IdealCurve& curve, double H) {
  const IdealCircle circle(curve.center().dir(), 2.0 * std::atan(best_fit_planar_radius(curve)));
  return equidistant_leaf(circle, H, curve.center_positive() ? CapSide::Inside : CapSide::Outside);
}

namespace {

struct RingLayout {
  std::vector<double> psi;
  std::vector<int> count;
  int vertices() const {
    int n = 1;
    for (int c : count) n += c;
    return n;
  }
};

// Meridian of the template dome x = (R sin psi, zc + R cos psi) with
// cumulative hyperbolic arclength tabulated for inversion.
struct Meridian {
  double zc, R, psi_b;
  std::vector<double> psi, s;

  Meridian(double zc_, double R_, double eps) : zc(zc_), R(R_) {
    psi_b = std::acos(std::clamp((eps - zc) / R, -1.0, 1.0));
    const int n = 20000;
    psi.resize(n + 1);
    s.resize(n + 1);
    s[0] = 0.0;
    for (int i = 0; i <= n; ++i) psi[i] = psi_b * i / n;
    auto f = [&](double p) { return R / (zc + R * std::cos(p)); };
    for (int i = 0; i < n; ++i) {
      const double a = psi[i], b = psi[i + 1];
      s[i + 1] = s[i] + (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
  }
  double length() const { return s.back(); }
  double height(double p) const { return zc + R * std::cos(p); }
  double invert(double target) const {
    const auto it = std::lower_bound(s.begin(), s.end(), target);
    if (it == s.begin()) return 0.0;
    if (it == s.end()) return psi_b;
    const std::size_t i = it - s.begin();
    const double t = (target - s[i - 1]) / (s[i] - s[i - 1]);
    return psi[i - 1] + t * (psi[i] - psi[i - 1]);
  }
};

RingLayout layout(const Meridian& mer, double ds) {
  RingLayout out;
  const int n = std::max(2, static_cast<int>(std::ceil(mer.length() / ds)));
  int prev = 6;
  for (int j = 1; j <= n; ++j) {
    const double p = j == n ? mer.psi_b : mer.invert(mer.length() * j / n);
    const double circ = 2.0 * std::numbers::pi * mer.R * std::sin(p) / mer.height(p);
    int c = static_cast<int>(std::lround(circ / (1.155 * ds)));
    c = std::clamp(c, prev, 2 * prev);
    out.psi.push_back(p);
    out.count.push_back(c);
    prev = c;
  }
  return out;
}

void zipper(int a0, int na, double offa, int b0, int nb, double offb, std::vector<Tri>& tris) {
  int i = 0, j = 0;
  while (i < na || j < nb) {
    const double next_a = (i + 1 + offa) / na;
    const double next_b = (j + 1 + offb) / nb;
    const bool advance_b = i == na || (j < nb && next_b <= next_a);
    if (advance_b) {
      tris.push_back({a0 + i % na, b0 + j % nb, b0 + (j + 1) % nb});
      ++j;
    } else {
      tris.push_back({a0 + i % na, b0 + j % nb, a0 + (i + 1) % na});
      ++i;
    }
  }
}

}  // namespace

DiscreteSurface build_initial_mesh(const IdealCurve& curve, double H, double eps, int target_vertices) {
  if (target_vertices < 200) throw std::invalid_argument("mesh resolution below 200 vertices");
  if (!(std::abs(H) < 1.0)) throw std::invalid_argument("mesh needs |H| < 1");
  if (!(eps > 0.0 && eps <= 0.05)) throw std::invalid_argument("collar height must lie in (0, 0.05]");
  if (!is_star_shaped(curve).star) throw std::invalid_argument("curve is not star-shaped about its center");

  const double rf = best_fit_planar_radius(curve);
  const double w = std::sqrt(1.0 - H * H);
  const double he = curve.orientation_sign() * H;
  const Meridian mer(he * rf / w, rf / w, eps);

  // Largest spacing reaching the target count.
  double lo = 1e-3, hi = 4.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (layout(mer, mid).vertices() >= target_vertices) lo = mid; else hi = mid;
  }
  const RingLayout rings = layout(mer, lo);
  const int nr = static_cast<int>(rings.psi.size());

  DiscreteSurface s;
  s.H = H;
  s.eps = eps;
  const Frame& frame = curve.frame();
  s.vertices.push_back(frame.from_half(Vec3(0, 0, mer.height(0.0))));
  std::vector<int> start(nr);
  std::vector<double> offset(nr);
  for (int j = 0; j < nr; ++j) {
    start[j] = static_cast<int>(s.vertices.size());
    offset[j] = 0.5 * ((nr - 1 - j) % 2);
    const int n = rings.count[j];
    const double p = rings.psi[j];
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * std::numbers::pi * (i + offset[j]) / n;
      double rad, h;
      if (j == nr - 1) {
        rad = collar_radius(curve, H, eps, phi);
        h = eps;
      } else {
        rad = mer.R * std::sin(p) * curve.planar_radius(phi) / rf;
        h = mer.height(p);
        // Rows just above the ring follow the osculating leaf, whose drift
        // has the right direction on non-round curves.
        if (h < kCollarBlend) {
          const double t = std::clamp((kCollarBlend - h) / (kCollarBlend - eps), 0.0, 1.0);
          const double w = t * t * (3.0 - 2.0 * t);
          rad = (1.0 - w) * rad + w * collar_radius(curve, H, h, phi);
        }
      }
      s.vertices.push_back(frame.from_half(Vec3(rad * std::cos(phi), rad * std::sin(phi), h)));
    }
  }
  for (int i = 0; i < rings.count[0]; ++i) {
    s.triangles.push_back({0, start[0] + i, start[0] + (i + 1) % rings.count[0]});
  }
  for (int j = 0; j + 1 < nr; ++j) {
    zipper(start[j], rings.count[j], offset[j], start[j + 1], rings.count[j + 1], offset[j + 1], s.triangles);
  }
  for (int i = 0; i < rings.count[nr - 1]; ++i) s.boundary.push_back(start[nr - 1] + i);

  // Wind toward Omega+ as seen by the template leaf.
  const GeneralizedSphere carrier = template_leaf(curve, H).carrier;
  double orient = 0.0;
  for (const auto& t : s.triangles) {
    const Vec3& a = s.vertices[t[0]];
    const Vec3 e = (s.vertices[t[1]] - a).cross(s.vertices[t[2]] - a);
    orient += e.dot(carrier.positive_normal((a + s.vertices[t[1]] + s.vertices[t[2]]) / 3.0));
  }
  if (orient < 0.0) {
    for (auto& t : s.triangles) std::swap(t[1], t[2]);
  }

  for (const auto& v : s.vertices) {
    if (v.norm() > 1.0 - 0.25 * eps) throw std::invalid_argument("mesh vertex violates |p| <= 1 - eps/4");
  }
  return s;
}

}  // namespace cmcfol
