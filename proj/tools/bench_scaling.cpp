#include "narycsg/generators.h"
#include "narycsg/pipeline.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace ncsg;

// Emits one row per tessellation level: the same torus layout subdivided
// finer and finer, so time can be regressed against (m+s)*log2(h).
int main(int argc, char** argv) {
  CLI::App app{"scaling rows for the vertex search: m s h t_vertices_s"};

  std::string scene_kind = "t1";
  int n_tori = 6;
  std::vector<int> facets_per = {300, 600, 1200, 2400};
  std::string expr_text;
  uint64_t seed = 7;
  int threads = 0;
  int fmax = defaults::fmax;

  app.add_option("--scene", scene_kind, "t1 (random tori) | t2 (concentric narrow tori)")
      ->capture_default_str();
  app.add_option("--tori", n_tori, "meshes per scene")->capture_default_str();
  app.add_option("--facets-per", facets_per,
                 "facets per torus; one output row per value, same layout each time");
  app.add_option("--expr", expr_text, "boolean function (default: union of all inputs)");
  app.add_option("--seed", seed, "layout + jitter seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads, 0 = one per hardware thread")
      ->capture_default_str();
  app.add_option("--fmax", fmax, "leaf fragment threshold")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (expr_text.empty()) {
    expr_text = "union(P0..P" + std::to_string(n_tori - 1) + ")";
  }
  auto expr = parse_expr(expr_text);
  if (!expr) {
    std::cerr << "cannot parse --expr '" << expr_text << "'\n";
    return 1;
  }

  std::printf("%12s %12s %12s %14s\n", "m", "s", "h", "t_vertices_s");
  for (int fpt : facets_per) {
    std::vector<Mesh> scene;
    if (scene_kind == "t1")
      scene = t1_scene(n_tori, fpt, seed);
    else if (scene_kind == "t2")
      scene = t2_scene(n_tori, fpt, seed);
    else {
      std::cerr << "unknown --scene '" << scene_kind << "'\n";
      return 1;
    }
    PipelineConfig cfg;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.fmax = fmax;
    cfg.tesselate = TesselateMode::None;
    PipelineResult res;
    try {
      res = run_pipeline(std::move(scene), BoolFn::from_expr(*expr, n_tori), cfg);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 1;
    }
    std::printf("%12llu %12llu %12llu %14.6f\n",
                static_cast<unsigned long long>(res.stats.m),
                static_cast<unsigned long long>(res.stats.s),
                static_cast<unsigned long long>(res.stats.h), res.stats.t_vertices_s);
    std::fflush(stdout);
  }
  return 0;
}
