// Shared per-triangle kernel for the serial and OpenMP paths.
#pragma once

#include "cmcfol/kernels.hpp"

#include <cmath>

namespace cmcfol::detail {

struct FieldJet {
  double g;    // W = g x
  double gpr;  // g'(r) / r, so DW = g I + gpr x x^T
};

inline FieldJet volume_field_jet(const Vec3& x) {
  const double r2 = x.squaredNorm();
  if (r2 < 0.0625) {
    // 8 sum C(k+2,2) r^{2k} / (2k+3) and its derivative over r.
    double g = 1.0 / 3.0, gpr = 0.0, prev = 1.0;  // prev = r^{2(k-1)}
    for (int k = 1; k < 40; ++k) {
      const double c = 0.5 * (k + 1) * (k + 2);
      g += c * prev * r2 / (2 * k + 3);
      gpr += c * 2 * k * prev / (2 * k + 3);
      prev *= r2;
      if (prev < 1e-18) break;
    }
    return {8.0 * g, 8.0 * gpr};
  }
  const double r = std::sqrt(r2);
  const double q = 1.0 - r2;
  const double g = (r * (1.0 + r2) / (q * q) - std::atanh(r)) / (r2 * r);
  const double lam3 = 8.0 / (q * q * q);
  return {g, (lam3 - 3.0 * g) / r2};
}

struct TriOut {
  double area, flux;
  Vec3 gA[3], gPhi[3];
};

inline double lambda_sq(const Vec3& x) {
  const double l = 2.0 / (1.0 - x.squaredNorm());
  return l * l;
}

// d(E . v) / d x_k for E = (x1 - x0) x (x2 - x0).
inline void edge_cross_grad(const Vec3& x0, const Vec3& x1, const Vec3& x2, const Vec3& v, Vec3 out[3]) {
  out[0] = (x1 - x2).cross(v);
  out[1] = (x2 - x0).cross(v);
  out[2] = v.cross(x1 - x0);
}

inline void triangle_terms(const Vec3& x0, const Vec3& x1, const Vec3& x2, bool gradient, TriOut& o) {
  const Vec3 E = (x1 - x0).cross(x2 - x0);
  const double En = E.norm();
  // Midpoints m[q] of edge (q, q+1).
  const Vec3 m[3] = {0.5 * (x0 + x1), 0.5 * (x1 + x2), 0.5 * (x2 + x0)};
  double l2[3];
  FieldJet jet[3];
  double lsum = 0.0, fsum = 0.0;
  for (int q = 0; q < 3; ++q) {
    l2[q] = lambda_sq(m[q]);
    lsum += l2[q];
    jet[q] = volume_field_jet(m[q]);
    fsum += jet[q].g * m[q].dot(E);
  }
  o.area = En * lsum / 6.0;
  o.flux = fsum / 6.0;
  if (!gradient) return;

  Vec3 dn[3], dw[3];
  edge_cross_grad(x0, x1, x2, En > 0 ? Vec3(E / En) : Vec3::Zero(), dn);
  const Vec3 wsum = jet[0].g * m[0] + jet[1].g * m[1] + jet[2].g * m[2];
  edge_cross_grad(x0, x1, x2, wsum, dw);
  for (int k = 0; k < 3; ++k) {
    o.gA[k] = dn[k] * lsum / 6.0;
    o.gPhi[k] = dw[k] / 6.0;
  }
  // Midpoint q touches corners q and q+1 with weight 1/2.
  for (int q = 0; q < 3; ++q) {
    const double l = 2.0 / (1.0 - m[q].squaredNorm());
    const Vec3 grad_l2 = 2.0 * l * l * l * m[q];
    const Vec3 dwE = jet[q].g * E + jet[q].gpr * m[q].dot(E) * m[q];
    const Vec3 ga = En * grad_l2 / 12.0;
    const Vec3 gp = dwE / 12.0;
    o.gA[q] += ga;
    o.gA[(q + 1) % 3] += ga;
    o.gPhi[q] += gp;
    o.gPhi[(q + 1) % 3] += gp;
  }
}

}  // namespace cmcfol::detail
