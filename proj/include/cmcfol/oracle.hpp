// Closed-form reference leaves for round ideal circles.
#pragma once

#include "cmcfol/mesh.hpp"

namespace cmcfol {

/// Round ideal curve with the given circle; Omega+ is the chosen cap.
IdealCurve round_curve(const IdealCircle& circle, CapSide positive = CapSide::Inside);

/// Triangulated sampling of the exact equidistant leaf of `circle`, with the
/// same layout and collar as the solver's initial mesh.
DiscreteSurface exact_cap(const IdealCircle& circle, double H, int m, double eps = 0.02,
                          CapSide positive = CapSide::Inside);

/// Hyperbolic distance from p to the exact leaf (equidistant leaves are
/// parallel, so this is |d(p, plane) - d(leaf, plane)|).
double distance_to_cap(const IdealCircle& circle, double H, CapSide positive, const Vec3& p);

/// Max over vertices of distance_to_cap.
double max_cap_deviation(const DiscreteSurface& s, const IdealCircle& circle, double H,
                         CapSide positive = CapSide::Inside);

}  // namespace cmcfol
