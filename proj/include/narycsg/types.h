#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <string>

namespace ncsg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Tolerances used across the library. All geometric tolerances are relative:
// they get multiplied by a local scale (facet diameter, scene bbox diagonal)
// before use, so the code is unit-agnostic.
namespace tol {
// A facet loop is planar if every vertex is within this fraction of the facet
// diameter from the fitted plane. Also used for on-plane point tests.
inline constexpr double planarity_rel = 1e-9;
// 3x3 determinant threshold for triple-plane intersection, relative to scale^3.
inline constexpr double det3_rel = 1e-12;
// Unit-vector length deviation accepted by validators.
inline constexpr double unit_norm = 1e-12;
// Chaining: two successor candidates closer than this (relative to scene
// diagonal) along the search line are ambiguous.
inline constexpr double chain_tie_rel = 1e-12;
// Ray casting retries before giving up on a grazing configuration.
inline constexpr int grazing_retries = 8;
}  // namespace tol

// Defaults for the hierarchical exploration; overridable from the CLI.
namespace defaults {
inline constexpr int fmax = 20;            // leaf facet budget
inline constexpr int seq_threshold = 80;   // below this, no task spawning
inline constexpr int max_depth = 64;       // hard KD depth guard
inline constexpr int top_parallel_levels = 3;  // split pass parallelized here
inline constexpr double jitter_translate_rel = 1e-6;
}  // namespace defaults

struct Box3 {
  Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
          std::numeric_limits<double>::max()};
  Vec3 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
          std::numeric_limits<double>::lowest()};

  bool empty() const { return lo.x() > hi.x(); }
  void expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void expand(const Box3& b) {
    if (!b.empty()) {
      lo = lo.cwiseMin(b.lo);
      hi = hi.cwiseMax(b.hi);
    }
  }
  Vec3 extent() const { return hi - lo; }
  double diagonal() const { return empty() ? 0.0 : extent().norm(); }
  int largest_axis() const {
    Vec3 e = extent();
    if (e.x() >= e.y() && e.x() >= e.z()) return 0;
    return e.y() >= e.z() ? 1 : 2;
  }
  // Cells partition space with half-open membership so every point lands in
  // exactly one cell of a subdivision.
  bool contains_halfopen(const Vec3& p) const {
    return p.x() >= lo.x() && p.x() < hi.x() && p.y() >= lo.y() && p.y() < hi.y() &&
           p.z() >= lo.z() && p.z() < hi.z();
  }
  Box3 inflated(double amount) const {
    Box3 b = *this;
    b.lo.array() -= amount;
    b.hi.array() += amount;
    return b;
  }
};

// Identifies a facet of one of the input meshes.
struct FacetRef {
  int32_t mesh = -1;
  int32_t facet = -1;

  friend bool operator==(const FacetRef&, const FacetRef&) = default;
  friend auto operator<=>(const FacetRef&, const FacetRef&) = default;
};

struct FacetRefHash {
  size_t operator()(const FacetRef& f) const {
    return std::hash<uint64_t>()((uint64_t(uint32_t(f.mesh)) << 32) | uint32_t(f.facet));
  }
};

// Non-fatal conditions accumulated during a run. Any nonzero total downgrades
// the CLI exit code to 2 (output still written).
struct ErrorCounters {
  uint64_t degeneracy = 0;            // grazing rays, parallel planes, on-plane points
  uint64_t singular_intersection = 0; // reversion hit a near-singular system
  uint64_t incomplete_loop = 0;       // facet chain hit a dead end
  uint64_t ambiguous_chain = 0;       // two successors at the same offset
  uint64_t tesselation_failure = 0;   // self-touching loop set
  uint64_t orientation_undecided = 0; // extremal facet test degenerate
  uint64_t indicator_undecided = 0;   // ray shooting exhausted its retries
  uint64_t max_depth_hit = 0;         // KD recursion forced into a leaf

  uint64_t total() const {
    return degeneracy + singular_intersection + incomplete_loop + ambiguous_chain +
           tesselation_failure + orientation_undecided + indicator_undecided + max_depth_hit;
  }
  ErrorCounters& operator+=(const ErrorCounters& o) {
    degeneracy += o.degeneracy;
    singular_intersection += o.singular_intersection;
    incomplete_loop += o.incomplete_loop;
    ambiguous_chain += o.ambiguous_chain;
    tesselation_failure += o.tesselation_failure;
    orientation_undecided += o.orientation_undecided;
    indicator_undecided += o.indicator_undecided;
    max_depth_hit += o.max_depth_hit;
    return *this;
  }
};

// Deterministic scalar hash -> 64-bit seed material. Used to derive ray
// directions from query point coordinates so results do not depend on
// scheduling order.
inline uint64_t hash_point_bits(const Vec3& p, uint64_t seed) {
  auto mix = [](uint64_t h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return h;
  };
  uint64_t h = seed ^ 0x5851f42d4c957f2dull;
  uint64_t bits;
  static_assert(sizeof(double) == sizeof(uint64_t));
  std::memcpy(&bits, &p.x(), 8);
  h = mix(h, bits);
  std::memcpy(&bits, &p.y(), 8);
  h = mix(h, bits);
  std::memcpy(&bits, &p.z(), 8);
  h = mix(h, bits);
  return h;
}

// Uniform double in [0,1) from a raw 64-bit generator value.
inline double unit_double(uint64_t r) { return double(r >> 11) * 0x1p-53; }

}  // namespace ncsg
