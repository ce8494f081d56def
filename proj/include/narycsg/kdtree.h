#pragma once

#include "narycsg/brute.h"
#include "narycsg/classify.h"
#include "narycsg/predicates.h"

#include <array>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace ncsg {

// One exploration cell: axis-aligned box, the per-input facet fragments
// cropped to it, and the per-input ternary indicator. A slot is Undef exactly
// when the input still has fragments here; a defined slot means the whole
// cell is on one side of that input.
struct KDCell {
  Box3 box;
  int depth = 0;
  std::vector<std::vector<LocalFrag>> frags;
  std::vector<Box3> frag_box;  // per-input bounds of the fragments present
  IndicatorVec ind;

  size_t total_frags() const {
    size_t t = 0;
    for (const auto& f : frags) t += f.size();
    return t;
  }
};

struct ExplorationConfig {
  int fmax = defaults::fmax;                // leaf facet budget
  int seq_threshold = defaults::seq_threshold;  // no task spawning below this
  int max_depth = defaults::max_depth;
  uint64_t seed = 0;

  bool valid() const { return fmax >= 1 && seq_threshold >= fmax && max_depth >= 1; }
};

struct KdStats {
  int64_t cells_visited = 0;
  int64_t branch1_pruned = 0;   // f(cell) decided without looking inside
  int64_t branch2_cells = 0;    // single-input cells emitted by flip probe
  int64_t branch2_probe_constant = 0;  // cell was u but the one-bit flip is not
  int64_t leaf_calls = 0;
  int64_t split_count = 0;      // fragments cut in two (the s of the cost model)
  int64_t max_depth_hit = 0;
  BruteStats counts;            // candidate/classification counters, as in brute force

  KdStats& operator+=(const KdStats& o) {
    cells_visited += o.cells_visited;
    branch1_pruned += o.branch1_pruned;
    branch2_cells += o.branch2_cells;
    branch2_probe_constant += o.branch2_probe_constant;
    leaf_calls += o.leaf_calls;
    split_count += o.split_count;
    max_depth_hit += o.max_depth_hit;
    counts += o.counts;
    return *this;
  }
};

// Root cell: scene bounding box inflated a little so no input vertex sits on
// the boundary, all facets as single fragments, all slots Undef.
KDCell make_root_cell(const std::vector<Mesh>& scene);

Trit classify_cell(const KDCell& cell, const BoolFn& fn);

struct SplitPlane {
  int axis = 0;
  double mid = 0;
};
SplitPlane choose_split(const KDCell& cell);

// Orientation bookkeeping for sides that end up without fragments: the
// lexicographic maximum of (z, d, s) over fragment vertices toward one side,
// carrying the owning facet's normal. z is the signed coordinate along the
// split axis, d the projected distance of the remote incident edge one unit
// below the extremal vertex, s the slope tiebreaker. All three are computed
// the same way from the same coordinates wherever the vertex appears, so
// exact comparisons are stable.
struct ExtremalBest {
  std::array<double, 3> trip{-std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity()};
  Vec3 normal = Vec3::Zero();
  bool valid = false;

  void consider(const std::array<double, 3>& t, const Vec3& n) {
    if (!valid || t > trip) {
      trip = t;
      normal = n;
      valid = true;
    }
  }
  // Keeps the earlier side on exact ties, so chunked merges in input order
  // reproduce the sequential winner.
  void merge(const ExtremalBest& later) {
    if (later.valid) consider(later.trip, later.normal);
  }
};

void stream_extremal(const LocalFrag& frag, int axis, ExtremalBest& toward_hi,
                     ExtremalBest& toward_lo);

// Routes one fragment into the children, clipping when the plane cuts it.
// Returns true exactly when the fragment was cut in two.
bool split_fragment(LocalFrag frag, const SplitPlane& sp, std::vector<LocalFrag>& lo,
                    std::vector<LocalFrag>& hi);

// Pieces of the split pass, separated so the parallel runtime can run the
// fragment distribution in deterministic chunks and merge in input order.
struct InputSplitResult {
  std::vector<LocalFrag> lo, hi;
  ExtremalBest toward_hi, toward_lo;
  int64_t cuts = 0;
};

// Distributes fragments [b, e) of one input list (moving them out) and
// accumulates the extremal bookkeeping for that range.
InputSplitResult split_range(std::vector<LocalFrag>& frags, size_t b, size_t e,
                             const SplitPlane& sp);

// Appends `later` after `acc` preserving input order.
void merge_split_results(InputSplitResult& acc, InputSplitResult&& later);

// Boxes, depth and inherited indicator of the two children.
void prepare_children(const KDCell& cell, const SplitPlane& sp, KDCell& lo, KDCell& hi);

// Installs one input's distributed fragments into the children and resolves
// the indicator slot of any side left empty.
void finish_split_input(KDCell& lo, KDCell& hi, int input, InputSplitResult&& r,
                        const SplitPlane& sp, const Mesh& mesh, uint64_t seed, double scale,
                        KdStats& stats, ErrorCounters& errs);

// Decides the indicator bit of an empty child side from the sibling's
// extremal facet; sigma is +1 for the upper child. Degenerate orientation
// falls back to a global ray from `fallback_point` (the child centroid).
Slot resolve_side_indicator(const ExtremalBest& best, int axis, int sigma, const Mesh& mesh,
                            const Vec3& fallback_point, uint64_t seed, double scale,
                            ErrorCounters& errs);

void split_cell(KDCell&& cell, const std::vector<Mesh>& scene, uint64_t seed, double scale,
                KDCell& lo, KDCell& hi, KdStats& stats, ErrorCounters& errs);

enum class StepResult { Pruned, Emitted, Split };

// One node of the four-branch recursion: prune when the cell's ternary value
// is decided; emit order-1 candidates by flip probe when exactly one slot is
// undefined; run the local vertex search when few fragments remain (or the
// depth guard fires); otherwise split into `kids`.
StepResult kd_step(KDCell&& cell, const std::vector<Mesh>& scene, const BoolFn& fn,
                   const ExplorationConfig& cfg, double scale, std::vector<FinalVertex>& out,
                   ErrorCounters& errs, KdStats& stats, std::pair<KDCell, KDCell>& kids);

// Same step with the split pass swapped out (the parallel runtime substitutes
// a chunked splitter near the root). The splitter must produce the same
// children as split_cell or results stop being worker-count independent.
using SplitFn =
    std::function<void(KDCell&&, KDCell& lo, KDCell& hi, KdStats&, ErrorCounters&)>;

StepResult kd_step_with(KDCell&& cell, const std::vector<Mesh>& scene, const BoolFn& fn,
                        const ExplorationConfig& cfg, double scale,
                        std::vector<FinalVertex>& out, ErrorCounters& errs, KdStats& stats,
                        std::pair<KDCell, KDCell>& kids, const SplitFn& split);

// Canonical order plus duplicate-provenance check; a duplicate means the cell
// coverage convention is broken and throws.
void sort_and_check_unique(std::vector<FinalVertex>& verts);

struct KdResult {
  std::vector<FinalVertex> verts;
  KdStats stats;
};

KdResult kd_vertices(const std::vector<Mesh>& scene, const BoolFn& fn,
                     const ExplorationConfig& cfg, ErrorCounters& errs);

}  // namespace ncsg
