#pragma once

#include "narycsg/boolfn.h"
#include "narycsg/io.h"
#include "narycsg/parallel.h"
#include "narycsg/reconstruct.h"

namespace ncsg {

struct PipelineConfig {
  JitterMode jitter = JitterMode::Both;
  uint64_t seed = 0;
  bool brute = false;      // reference engine instead of the hierarchical one
  int threads = 1;         // 0 = one per hardware thread
  int fmax = defaults::fmax;
  int seq_threshold = defaults::seq_threshold;
  int max_depth = defaults::max_depth;
  TesselateMode tesselate = TesselateMode::None;
};

struct PipelineResult {
  PolySoup soup;          // final polygons, original (unjittered) coordinates
  OutputMesh raw;         // boundary loops before tesselation
  std::vector<FinalVertex> verts;
  StatsRecord stats;
  ErrorCounters errors;
  KdStats kd;             // exploration counters; only `counts` in brute mode
};

// Whole run on one scene: topology, jitter, vertex search, facet loops,
// jitter reversion, tesselation. Meshes may arrive with or without topology
// built; invalid input throws std::invalid_argument.
PipelineResult run_pipeline(std::vector<Mesh> scene, const BoolFn& fn,
                            const PipelineConfig& cfg);

// Compacts soup polygons into a Mesh (dropping unused vertices); the caller
// runs topology_pass to make it usable.
Mesh soup_to_mesh(const PolySoup& soup);

// Walks a binary CSG tree left-to-right, accumulating input meshes; whenever
// `grouping` of them have piled up, that group is evaluated as one n-ary call
// and the resulting mesh re-enters as a leaf. grouping = 2 is classic binary
// evaluation, grouping <= 0 means no limit (one single call). Intermediate
// results are triangulated so they are valid inputs again; stats and error
// counters accumulate over all invocations.
PipelineResult run_grouped(const std::vector<Mesh>& scene, const ExprPtr& tree, int grouping,
                           const PipelineConfig& cfg);

}  // namespace ncsg
