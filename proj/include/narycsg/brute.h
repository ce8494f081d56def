#pragma once

#include "narycsg/boolfn.h"
#include "narycsg/classify.h"
#include "narycsg/mesh.h"

#include <vector>

namespace ncsg {

// Instrumentation for the reference engine; used by tests asserting the
// enumeration structure (e.g. the facet-triple scan only happens after a
// facet pair actually intersected).
struct BruteStats {
  uint64_t order1_tested = 0;
  uint64_t order2_candidates = 0;  // segment endpoints before dedup
  uint64_t order2_classified = 0;  // after dedup
  uint64_t order2_kept = 0;
  uint64_t pair_segments = 0;          // facet pairs that produced a segment
  uint64_t order3_loop_entries = 0;    // facet-triple scans started
  uint64_t order3_candidates = 0;
  uint64_t order3_kept = 0;

  BruteStats& operator+=(const BruteStats& o) {
    order1_tested += o.order1_tested;
    order2_candidates += o.order2_candidates;
    order2_classified += o.order2_classified;
    order2_kept += o.order2_kept;
    pair_segments += o.pair_segments;
    order3_loop_entries += o.order3_loop_entries;
    order3_candidates += o.order3_candidates;
    order3_kept += o.order3_kept;
    return *this;
  }
};

// Reference vertex finder: tests every input vertex, every facet pair and
// (for each intersecting pair) every third facet. Quartic in the worst case;
// intended for small scenes and as the oracle for the hierarchical engine.
// Indicator bits come from global ray shooting seeded by `seed`.
std::vector<FinalVertex> csg_vertices(const std::vector<Mesh>& scene, const BoolFn& fn,
                                      uint64_t seed, ErrorCounters& errs,
                                      BruteStats* stats = nullptr);

// Canonical result order shared by both engines: sort by provenance key.
void sort_vertices(std::vector<FinalVertex>& v);

}  // namespace ncsg
