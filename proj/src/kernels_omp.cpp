#include "tri_terms.hpp"

#include <omp.h>

namespace cmcfol::kernels {

SurfaceTerms evaluate_omp(const std::vector<Vec3>& v, const std::vector<Tri>& t, const Incidence& inc,
                          bool gradient) {
  const long nt = static_cast<long>(t.size());
  const long nv = static_cast<long>(v.size());
  std::vector<detail::TriOut> per(nt);

#pragma omp parallel for schedule(static)
  for (long i = 0; i < nt; ++i) {
    detail::triangle_terms(v[t[i][0]], v[t[i][1]], v[t[i][2]], gradient, per[i]);
  }

  SurfaceTerms out;
  for (long i = 0; i < nt; ++i) {
    out.A += per[i].area;
    out.Phi += per[i].flux;
  }
  if (!gradient) return out;

  out.gA.assign(nv, Vec3::Zero());
  out.gPhi.assign(nv, Vec3::Zero());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nv; ++i) {
    Vec3 a = Vec3::Zero(), p = Vec3::Zero();
    for (int s = inc.offset[i]; s < inc.offset[i + 1]; ++s) {
      a += per[inc.tri[s]].gA[inc.corner[s]];
      p += per[inc.tri[s]].gPhi[inc.corner[s]];
    }
    out.gA[i] = a;
    out.gPhi[i] = p;
  }
  return out;
}

}  // namespace cmcfol::kernels
