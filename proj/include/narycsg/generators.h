#pragma once

#include "narycsg/mesh.h"

#include <vector>

namespace ncsg {

// All generators return meshes with topology already built (they are valid by
// construction; a failed topology pass here is a programming error).

Mesh make_box(const Vec3& lo, const Vec3& hi);
Mesh make_tetra(const Vec3& center, double scale);
// 20 * 4^subdiv triangles.
Mesh make_icosphere(const Vec3& center, double radius, int subdiv);
// Triangulated torus, 2*nu*nv facets (quads are not planar on a torus).
Mesh make_torus(const Vec3& center, const Vec3& axis, double major_r, double minor_r, int nu,
                int nv);

// Random overlapping tori packed in a unit box; the workhorse dense scene.
// facets_per_torus is rounded to the nearest realizable 2*nu*nv grid.
std::vector<Mesh> t1_scene(int n_tori, int facets_per_torus, uint64_t seed);

// Narrow tori wrapped around great circles of one sphere; every pair of tori
// intersects, which makes min-k functions interesting.
std::vector<Mesh> t2_scene(int n_tori, int facets_per_torus, uint64_t seed,
                           double sphere_r = 1.0);

// Mixed small primitives (boxes, icospheres, tori) with overlapping
// placements; used for randomized oracle comparisons.
std::vector<Mesh> random_mix_scene(int n_meshes, int max_facets_each, uint64_t seed);

}  // namespace ncsg
