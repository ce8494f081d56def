#pragma once

#include "narycsg/mesh.h"
#include "narycsg/types.h"

#include <optional>
#include <span>
#include <vector>

namespace ncsg {

// One endpoint of a facet-facet intersection segment: the point where a
// boundary edge of `edge_facet` crosses the plane of `crossed`. The corner
// index pins the exact loop edge (loop[k] -> loop[k+1]). Coordinates are
// always computed from the edge endpoints in canonical order (smaller vertex
// id first) so every discovery route yields bit-identical doubles.
struct SegEndpoint {
  Vec3 p;
  FacetRef edge_facet;
  int32_t edge_corner = -1;
  FacetRef crossed;
};

struct Segment {
  SegEndpoint e0, e1;  // ordered along dir
  Vec3 dir;            // unit normal-cross direction of the two planes
};

// Intersection of two convex facets from different meshes: the common-line
// interval covered by both polygons. Returns nothing when the planes are
// parallel or the clipped interval is empty. Touching or otherwise degenerate
// contacts bump errs.degeneracy and return nothing.
std::optional<Segment> intersect2facets(const std::vector<Mesh>& scene, FacetRef a, FacetRef b,
                                        ErrorCounters& errs);

// Unique transversal crossing of the segment with the facet's plane, accepted
// only strictly inside the convex loop. Near-parallel segments and hits near
// the loop boundary flag degeneracy and return nothing.
std::optional<Vec3> intersectSegmentFacet(const Segment& seg, const std::vector<Mesh>& scene,
                                          FacetRef c, ErrorCounters& errs);

// Winding-number point-in-solid test by random ray. Direction is derived from
// the point's coordinate bits plus `seed`, so results are reproducible and
// independent of call order. Grazing configurations retry with a fresh
// direction; after tol::grazing_retries failures returns nullopt and bumps
// errs.indicator_undecided.
std::optional<int> shoot_ray_global(const Vec3& x, const Mesh& mesh, uint64_t seed, double scale,
                                    ErrorCounters& errs);

// A cropped piece of one input facet inside a KD cell.
struct LocalFrag {
  FacetRef src;
  std::vector<Vec3> poly;  // convex, CCW under the source facet normal
  Vec3 n;                  // source facet plane
  double d;
  double diameter;
};

// Point-in-solid test that only looks at the given fragments (all of one
// mesh, all inside one cell, x inside the same cell). Aims at the centroid of
// the fragment with the smallest source ref, which guarantees at least one
// hit; the nearest hit's facing decides the bit. Degenerate configurations
// (grazing, zero dot) flag and return nullopt so the caller can fall back to
// the global test.
std::optional<int> shoot_ray_local(const Vec3& x, std::span<const LocalFrag> frags,
                                   ErrorCounters& errs);

// Splits a convex loop by the plane n.dot(x) = d. Output pieces keep the
// input winding; crossing points are computed once and shared between the two
// pieces. A piece with fewer than 3 vertices is returned empty.
struct ClipResult {
  std::vector<Vec3> below;  // n.dot(x) <= d side
  std::vector<Vec3> above;
};
ClipResult clip_polygon_to_halfspace(std::span<const Vec3> loop, const Vec3& n, double d);

// Strictly-inside test for a convex planar loop; `boundary` is set when the
// point is within tolerance of an edge. Tolerance scales with diameter².
bool point_in_convex_polygon(const Vec3& p, std::span<const Vec3> loop, const Vec3& n,
                             double diameter, bool* boundary);

// Deterministic unit direction number `attempt` for the given point.
Vec3 seeded_unit_direction(const Vec3& x, uint64_t seed, int attempt);

}  // namespace ncsg
