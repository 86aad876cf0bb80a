#include "tri_terms.hpp"

namespace cmcfol {

double volume_field_g(double r) { return detail::volume_field_jet(Vec3(r, 0, 0)).g; }

Vec3 volume_field(const Vec3& x) { return detail::volume_field_jet(x).g * x; }

namespace kernels {

SurfaceTerms evaluate_serial(const std::vector<Vec3>& v, const std::vector<Tri>& t, bool gradient) {
  SurfaceTerms out;
  if (gradient) {
    out.gA.assign(v.size(), Vec3::Zero());
    out.gPhi.assign(v.size(), Vec3::Zero());
  }
  detail::TriOut o;
  for (const auto& tri : t) {
    detail::triangle_terms(v[tri[0]], v[tri[1]], v[tri[2]], gradient, o);
    out.A += o.area;
    out.Phi += o.flux;
    if (!gradient) continue;
    for (int k = 0; k < 3; ++k) {
      out.gA[tri[k]] += o.gA[k];
      out.gPhi[tri[k]] += o.gPhi[k];
    }
  }
  return out;
}

}  // namespace kernels
}  // namespace cmcfol
