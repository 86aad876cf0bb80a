// Per-triangle area and volume-flux kernels with exact gradients.
//
// Volume is measured by the flux of W(x) = g(|x|) x, whose divergence is the
// hyperbolic volume density lambda^3. The signed volume between two surfaces
// with a common boundary is the difference of their fluxes.
#pragma once

#include "cmcfol/mesh.hpp"

#include <vector>

namespace cmcfol {

/// g(r) with div(g(|x|) x) = (2 / (1 - |x|^2))^3.
double volume_field_g(double r);
Vec3 volume_field(const Vec3& x);

struct SurfaceTerms {
  double A = 0.0;    // hyperbolic area
  double Phi = 0.0;  // flux of W through the surface along the winding normal
  std::vector<Vec3> gA, gPhi;  // empty unless requested
};

namespace kernels {

/// Reference implementation: straight scatter-add over triangles.
SurfaceTerms evaluate_serial(const std::vector<Vec3>& v, const std::vector<Tri>& t, bool gradient);

/// OpenMP implementation: per-triangle outputs, then a fixed-order gather per
/// vertex, so results do not depend on the thread count.
SurfaceTerms evaluate_omp(const std::vector<Vec3>& v, const std::vector<Tri>& t, const Incidence& inc,
                          bool gradient);

}  // namespace kernels

}  // namespace cmcfol
