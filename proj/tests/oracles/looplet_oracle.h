#pragma once

#include "narycsg/types.h"

#include <cstdint>
#include <vector>

// First-principles looplet enumeration used to check the production kernels:
// sample the subvolume bits in every angular wedge of every host plane around
// the vertex, keep wedges whose two sides of the host differ under f, merge
// co-oriented neighbours, and read the corner rays off the merged regions.
// Collinear boundary rays mean the surface edge passes straight through the
// vertex, which is not a corner, so nothing is emitted there.
namespace ncsg::testor {

struct OracleLooplet {
  int host;  // order 2: 0 = left edge facet, 1 = right edge facet, 2 = crossed
             // order 3: position in the (sorted) facet triple
  int theta;
  Vec3 in_dir, out_dir;
};

// Order-2 vertex: directed edge g shared by facets A (left) and B (right) of
// one mesh, crossing facet C of another. nA, nB must be perpendicular to g.
// cls bit a = f(assignment a), a = (edge-mesh bit << 1) | crossed-mesh bit.
std::vector<OracleLooplet> oracle_order2(const Vec3& g, const Vec3& nA, const Vec3& nB,
                                         const Vec3& nC, uint8_t cls);

// Order-3 vertex: three facet planes through the vertex, one per mesh.
// cls bit a = f(assignment a), a = (bA << 2) | (bB << 1) | bC.
std::vector<OracleLooplet> oracle_order3(const Vec3& nA, const Vec3& nB, const Vec3& nC,
                                         uint8_t cls);

}  // namespace ncsg::testor
