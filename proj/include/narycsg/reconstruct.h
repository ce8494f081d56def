#pragma once

#include "narycsg/classify.h"
#include "narycsg/io.h"
#include "narycsg/mesh.h"

#include <vector>

namespace ncsg {

// Symbolic direction of an output edge: the ordered pair of facets whose
// planes carry it. The canonical geometric direction of (a,b) is
// normalize(na x nb) when the facets belong to different meshes, and the
// directed mesh edge with facet a on its left when they are edge-adjacent in
// one mesh. Reversing the pair negates the direction exactly.
struct DirKey {
  FacetRef a, b;
  DirKey rev() const { return {b, a}; }
  friend bool operator==(const DirKey&, const DirKey&) = default;
  friend auto operator<=>(const DirKey&, const DirKey&) = default;
};

// One corner of an output-facet loop: the loop arrives at `vertex` traveling
// along in_dir (whose key is in_key) and leaves along out_dir. theta tells
// whether the piece lies in the source facet's orientation or its flip.
struct Looplet {
  int32_t vertex = -1;
  FacetRef host;
  int8_t theta = 1;
  DirKey in_key, out_key;
  Vec3 in_dir, out_dir;
};

// Looplet kernels, pure in the local geometry; the mesh-driven generator
// below derives the frames and calls these. Exposed so tests can drive them
// with synthetic configurations.
//
// Order 2: vertex on edge (direction g, canonical smaller-vertex-id first) of
// one mesh, crossing facet C of another. A contains the directed edge +g, B
// the reverse. cls bit layout: bit((bi<<1)|bj) with bi = edge-owner mesh
// inside-bit, bj = crossed mesh inside-bit.
void looplets_order2_kernel(int32_t vertex, const Vec3& g, FacetRef A, const Vec3& nA, FacetRef B,
                            const Vec3& nB, FacetRef C, const Vec3& nC, uint8_t cls,
                            std::vector<Looplet>& out, ErrorCounters& errs);

// Order 3: three facets of three distinct meshes in classification order
// (bit((bA<<2)|(bB<<1)|bC)).
void looplets_order3_kernel(int32_t vertex, FacetRef A, const Vec3& nA, FacetRef B, const Vec3& nB,
                            FacetRef C, const Vec3& nC, uint8_t cls, std::vector<Looplet>& out,
                            ErrorCounters& errs);

// All looplets for the classified vertex set, in deterministic order.
std::vector<Looplet> make_looplets(const std::vector<Mesh>& scene,
                                   const std::vector<FinalVertex>& verts, ErrorCounters& errs);

struct OutLoop {
  std::vector<int32_t> v;  // vertex indices, walk order
};

struct OutFacet {
  FacetRef src;
  int8_t theta = 1;
  std::vector<OutLoop> loops;
};

struct OutputMesh {
  std::vector<FinalVertex> verts;
  std::vector<OutFacet> facets;
};

// Chains looplets into closed loops per (source facet, theta): repeatedly
// follow the outgoing direction to the nearest matching incoming looplet
// strictly ahead along the line. A loop closes when the nearest successor is
// its seed. Dead ends discard the partial loop and count IncompleteLoop; two
// successors at the same offset count AmbiguousChain.
OutputMesh csg_facets(const std::vector<Mesh>& scene, std::vector<FinalVertex> verts,
                      ErrorCounters& errs);

// Restores exact positions: order-1 vertices are reset to the original input
// coordinates bit-for-bit; order-2/3 are recomputed from the original
// (unjittered) edges and planes. An order-2 vertex whose edge is parallel to
// the crossed plane is projected onto the original edge line, which is exact
// when the edge lies inside that plane; other near-singular systems keep
// their jittered coordinates. Both count singular_intersection when the
// result misses a defining plane.
void revert_jitter(OutputMesh& out, const std::vector<Mesh>& original_scene,
                   ErrorCounters& errs);

enum class TesselateMode { None, Convex, Tri };

// Serializable polygons. None: raw loops grouped by a plane-id comment.
// Tri: ear-clipped triangles (holes bridged into their containing outer
// loop). Convex: triangles greedily merged back into convex polygons.
// `scene` provides source facet planes matching the CURRENT vertex
// coordinates (the original meshes after revert_jitter). Failures count
// TesselationFailure and fall back to the raw loops of the affected facet.
PolySoup tesselate_output(const OutputMesh& out, const std::vector<Mesh>& scene,
                          TesselateMode mode, ErrorCounters& errs);

std::optional<TesselateMode> parse_tesselate_mode(const std::string& s);

}  // namespace ncsg
