#include "cmcfol/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmcfol {

IdealCurve round_curve(const IdealCircle& circle, CapSide positive) {
  return IdealCurve::round(IdealPoint(circle.axis), circle.angle, positive == CapSide::Inside);
}

DiscreteSurface exact_cap(const IdealCircle& circle, double H, int m, double eps, CapSide positive) {
  if (!(std::abs(H) < 1.0)) throw std::invalid_argument("exact cap needs |H| < 1");
  return build_initial_mesh(round_curve(circle, positive), H, eps, m);
}

double distance_to_cap(const IdealCircle& circle, double H, CapSide positive, const Vec3& p) {
  return std::abs(signed_hyp_distance(equidistant_leaf(circle, H, positive), p));
}

double max_cap_deviation(const DiscreteSurface& s, const IdealCircle& circle, double H, CapSide positive) {
  const CanonicalLeaf leaf = equidistant_leaf(circle, H, positive);
  double worst = 0.0;
  for (const auto& v : s.vertices) worst = std::max(worst, std::abs(signed_hyp_distance(leaf, v)));
  return worst;
}

}  // namespace cmcfol
