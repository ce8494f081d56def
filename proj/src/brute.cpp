#include "narycsg/brute.h"

#include "narycsg/predicates.h"

#include <algorithm>
#include <unordered_set>

namespace ncsg {

void sort_vertices(std::vector<FinalVertex>& v) {
  std::sort(v.begin(), v.end(),
            [](const FinalVertex& a, const FinalVertex& b) { return a.prov.key() < b.prov.key(); });
}

std::vector<FinalVertex> csg_vertices(const std::vector<Mesh>& scene, const BoolFn& fn,
                                      uint64_t seed, ErrorCounters& errs, BruteStats* stats) {
  BruteStats local;
  BruteStats& st = stats ? *stats : local;

  Box3 scene_box;
  for (const Mesh& m : scene) scene_box.expand(mesh_bbox(m));
  const double scale = scene_box.diagonal();

  SlotResolver resolve = [&](int slot, const Vec3& x) -> std::optional<Slot> {
    auto r = shoot_ray_global(x, scene[slot], seed, scale, errs);
    if (!r) return std::nullopt;
    return *r ? Slot::In : Slot::Out;
  };

  std::vector<FinalVertex> out;

  // Order 1: every input vertex, tested once.
  for (size_t i = 0; i < scene.size(); ++i) {
    for (size_t v = 0; v < scene[i].V.size(); ++v) {
      ++st.order1_tested;
      auto fv = classify_candidate(scene[i].V[v], Provenance::order1(int32_t(i), int32_t(v)), fn,
                                   resolve);
      if (fv) out.push_back(std::move(*fv));
    }
  }

  // Global facet enumeration order: ascending (mesh, facet).
  std::vector<FacetRef> facets;
  for (size_t i = 0; i < scene.size(); ++i)
    for (size_t f = 0; f < scene[i].F.size(); ++f)
      facets.push_back({int32_t(i), int32_t(f)});

  std::unordered_set<Provenance, ProvenanceHash> seen2;

  for (size_t ia = 0; ia < facets.size(); ++ia) {
    for (size_t ib = ia + 1; ib < facets.size(); ++ib) {
      FacetRef a = facets[ia], b = facets[ib];
      if (a.mesh == b.mesh) continue;
      auto seg = intersect2facets(scene, a, b, errs);
      if (!seg) continue;
      ++st.pair_segments;

      for (const SegEndpoint* e : {&seg->e0, &seg->e1}) {
        ++st.order2_candidates;
        Provenance prov = Provenance::order2(scene[e->edge_facet.mesh], e->edge_facet.mesh,
                                             e->edge_facet.facet, e->edge_corner, e->crossed);
        if (!seen2.insert(prov).second) continue;  // both facets of the edge find it
        ++st.order2_classified;
        auto fv = classify_candidate(e->p, prov, fn, resolve);
        if (fv) {
          ++st.order2_kept;
          out.push_back(std::move(*fv));
        }
      }

      // Order 3 runs only under an existing pair segment. The global order
      // a < b plus c > b (and distinct meshes) visits each triple once, with
      // the triple already sorted.
      ++st.order3_loop_entries;
      for (size_t ic = ib + 1; ic < facets.size(); ++ic) {
        FacetRef c = facets[ic];
        if (c.mesh == a.mesh || c.mesh == b.mesh) continue;
        auto x = intersectSegmentFacet(*seg, scene, c, errs);
        if (!x) continue;
        ++st.order3_candidates;
        auto fv = classify_candidate(*x, Provenance::order3(a, b, c), fn, resolve);
        if (fv) {
          ++st.order3_kept;
          out.push_back(std::move(*fv));
        }
      }
    }
  }

  sort_vertices(out);
  return out;
}

}  // namespace ncsg
