#include "narycsg/pipeline.h"

#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <iostream>

using namespace ncsg;

int main(int argc, char** argv) {
  CLI::App app{"boundary mesh of an n-ary boolean function of closed polyhedral solids"};

  std::vector<std::string> in_files;
  std::string expr_text;
  std::string out_file;
  std::string stats_file;
  std::string tess_name = "none";
  std::string jitter_name = "both";
  uint64_t seed = 0;
  bool brute = false;
  int brute_limit = 2000;
  int threads = 0;
  int fmax = defaults::fmax;
  int seq_threshold = defaults::seq_threshold;
  int max_depth = defaults::max_depth;
  int grouping = -1;

  app.add_option("--in", in_files, "input mesh (.off or .obj); repeat, order defines P0,P1,...")
      ->required();
  app.add_option("--expr", expr_text,
                 "boolean expression over P0..Pn, e.g. \"(P0|P1)-P2\" or \"min2(P0..P3)\"")
      ->required();
  app.add_option("--out", out_file, "output mesh file (.off or .obj)");
  app.add_option("--stats", stats_file, "write run statistics to this file");
  app.add_option("--tesselate", tess_name, "output facets: none | convex | tri")
      ->capture_default_str();
  app.add_option("--jitter", jitter_name, "perturbation: none | translate | rotate | both")
      ->capture_default_str();
  app.add_option("--seed", seed, "seed for jitter and ray retries")->capture_default_str();
  app.add_flag("--brute", brute, "use the quartic reference vertex search");
  app.add_option("--brute-limit", brute_limit,
                 "largest total facet count --brute accepts")
      ->capture_default_str();
  app.add_option("--threads", threads, "worker threads, 0 = one per hardware thread")
      ->capture_default_str();
  app.add_option("--fmax", fmax, "fragment count below which cells stop splitting")
      ->capture_default_str();
  app.add_option("--seq-threshold", seq_threshold,
                 "fragment count below which subtrees stay on one worker")
      ->capture_default_str();
  app.add_option("--max-depth", max_depth, "hard split depth guard")->capture_default_str();
  app.add_option("--grouping", grouping,
                 "evaluate a binary tree in groups of G inputs; 0 = one single call");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto expr = parse_expr(expr_text);
  if (!expr) {
    std::cerr << "cannot parse --expr '" << expr_text << "'\n";
    return 1;
  }
  if (max_var(*expr) >= static_cast<int>(in_files.size())) {
    std::cerr << "expression uses P" << max_var(*expr) << " but only " << in_files.size()
              << " --in files were given\n";
    return 1;
  }

  std::vector<Mesh> scene;
  scene.reserve(in_files.size());
  size_t total_facets = 0;
  for (const std::string& path : in_files) {
    std::vector<ParseIssue> issues;
    auto m = load_mesh(path, issues);
    for (const ParseIssue& is : issues) {
      std::cerr << path;
      if (is.line > 0) std::cerr << ":" << is.line;
      std::cerr << ": " << is.message << "\n";
    }
    if (!m) return 1;
    total_facets += m->F.size();
    scene.push_back(std::move(*m));
  }
  if (brute && total_facets > static_cast<size_t>(brute_limit)) {
    std::cerr << "--brute on " << total_facets << " facets exceeds --brute-limit "
              << brute_limit << "\n";
    return 1;
  }

  PipelineConfig cfg;
  auto tess = parse_tesselate_mode(tess_name);
  auto jit = parse_jitter_mode(jitter_name);
  if (!tess) {
    std::cerr << "unknown --tesselate mode '" << tess_name << "'\n";
    return 1;
  }
  if (!jit) {
    std::cerr << "unknown --jitter mode '" << jitter_name << "'\n";
    return 1;
  }
  cfg.tesselate = *tess;
  cfg.jitter = *jit;
  cfg.seed = seed;
  cfg.brute = brute;
  cfg.threads = threads;
  cfg.fmax = fmax;
  cfg.seq_threshold = seq_threshold;
  cfg.max_depth = max_depth;

  PipelineResult res;
  try {
    if (grouping >= 0)
      res = run_grouped(scene, *expr, grouping, cfg);
    else
      res = run_pipeline(std::move(scene), BoolFn::from_expr(*expr, int(in_files.size())), cfg);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) {
      std::cerr << "cannot write '" << out_file << "'\n";
      return 1;
    }
    std::string lower = out_file;
    for (char& c : lower) c = char(std::tolower(static_cast<unsigned char>(c)));
    if (lower.ends_with(".obj"))
      write_obj(out, res.soup);
    else
      write_off(out, res.soup);
  }

  std::string stats_text = write_stats(res.stats);
  if (!stats_file.empty()) {
    std::ofstream out(stats_file);
    if (!out) {
      std::cerr << "cannot write '" << stats_file << "'\n";
      return 1;
    }
    out << stats_text;
  } else {
    std::cout << stats_text;
  }

  return res.errors.total() > 0 ? 2 : 0;
}
