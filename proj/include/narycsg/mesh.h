#pragma once

#include "narycsg/types.h"

#include <optional>
#include <string>
#include <vector>

namespace ncsg {

// Closed oriented polyhedral surface. Facet loops are CCW seen from outside,
// planar and convex within tolerance. A Mesh is only considered usable after
// topology_pass() returned no errors and filled the derived fields.
struct Mesh {
  std::vector<Vec3> V;
  std::vector<std::vector<int32_t>> F;

  // Filled by topology_pass:
  std::vector<Vec3> normal;       // unit outward normal per facet
  std::vector<double> offset;     // plane equation: normal.dot(x) == offset
  std::vector<double> diameter;   // facet bbox diagonal, for relative tolerances
  // opp[f][k] = facet on the other side of edge (F[f][k] -> F[f][k+1]).
  std::vector<std::vector<int32_t>> opp;
  // incident[v] = (facet, corner index) pairs around vertex v, unordered.
  std::vector<std::vector<std::pair<int32_t, int32_t>>> incident;

  int32_t next_in_loop(int32_t f, int32_t k) const {
    return F[f][(k + 1) % F[f].size()];
  }
  bool has_topology() const { return opp.size() == F.size() && !F.empty(); }
};

struct TopologyError {
  enum class Kind { NonManifold, OpenSurface, DegenerateFacet };
  Kind kind;
  int32_t facet;  // -1 when not tied to a single facet
  std::string detail;
};

// Builds adjacency and per-facet planes, and checks the Mesh invariants:
// every directed edge has exactly one opposite, loops are planar and convex,
// no empty/degenerate facets. Returns all violations found; the mesh is
// usable only when the list is empty.
std::vector<TopologyError> topology_pass(Mesh& m);

// Re-checks invariants on an already built mesh and additionally reports
// bitwise-duplicate vertex coordinates and non-unit normals. Human-readable,
// one string per violation.
std::vector<std::string> validate(const Mesh& m);

// Divergence-theorem volume. Positive for outward-oriented closed surfaces.
double signed_volume(const Mesh& m);

Box3 mesh_bbox(const Mesh& m);

enum class JitterMode { None, Translate, Rotate, Both };

// Shared rotation + per-mesh translations: x' = R*x + t[i]. Rotation is
// applied before translation so translations are expressed in the rotated
// frame. The transform is kept so order-1 vertices can be restored bit-exactly
// and order-2/3 vertices recomputed from the original primitives.
struct SceneTransform {
  JitterMode mode = JitterMode::None;
  Mat3 R = Mat3::Identity();
  std::vector<Vec3> t;

  Vec3 apply(const Vec3& p, size_t mesh_index) const {
    Vec3 q = R * p;
    if (mesh_index < t.size()) q += t[mesh_index];
    return q;
  }
};

// Perturbs the meshes in place. translate_rel scales the per-mesh random
// translation by the scene bbox diagonal. Plane data is recomputed from the
// jittered coordinates (topology is untouched).
SceneTransform apply_jitter(std::vector<Mesh>& meshes, JitterMode mode, uint64_t seed,
                            double translate_rel = defaults::jitter_translate_rel);

std::optional<JitterMode> parse_jitter_mode(const std::string& s);

}  // namespace ncsg
