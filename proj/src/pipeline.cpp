#include "narycsg/pipeline.h"

#include <chrono>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ncsg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

uint64_t derive_seed(uint64_t seed, uint64_t invocation) {
  uint64_t z = seed + (invocation + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

PipelineResult run_pipeline(std::vector<Mesh> scene, const BoolFn& fn,
                            const PipelineConfig& cfg) {
  if (scene.empty()) throw std::invalid_argument("no input meshes");
  if (scene.size() > IndicatorVec::kMaxN)
    throw std::invalid_argument("more inputs than indicator slots");
  if (fn.arity() > static_cast<int>(scene.size()))
    throw std::invalid_argument("expression references more inputs than given");
  ExplorationConfig ec;
  ec.fmax = cfg.fmax;
  ec.seq_threshold = cfg.seq_threshold;
  ec.max_depth = cfg.max_depth;
  ec.seed = cfg.seed;
  if (!cfg.brute && !ec.valid())
    throw std::invalid_argument("need 1 <= fmax <= seq-threshold and max-depth >= 1");

  PipelineResult res;

  auto t0 = std::chrono::steady_clock::now();
  for (size_t i = 0; i < scene.size(); ++i) {
    if (scene[i].F.empty()) throw std::invalid_argument("input mesh " + std::to_string(i) + " has no facets");
    if (scene[i].has_topology()) continue;
    auto errors = topology_pass(scene[i]);
    if (!errors.empty()) {
      std::ostringstream os;
      os << "input mesh " << i << ": " << errors.size() << " topology violations, first: "
         << errors.front().detail;
      throw std::invalid_argument(os.str());
    }
  }
  res.stats.t_topology_s = seconds_since(t0);

  // Keep the untouched scene: reversion and tesselation work against it.
  std::vector<Mesh> original = scene;
  SceneTransform tf = apply_jitter(scene, cfg.jitter, cfg.seed);

  ErrorCounters errs;
  std::vector<FinalVertex> verts;
  t0 = std::chrono::steady_clock::now();
  if (cfg.brute) {
    verts = csg_vertices(scene, fn, cfg.seed, errs, &res.kd.counts);
  } else {
    KdResult r = explore_parallel(scene, fn, ec, cfg.threads, errs);
    verts = std::move(r.verts);
    res.kd = r.stats;
  }
  res.stats.t_vertices_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  res.verts = verts;
  res.raw = csg_facets(scene, std::move(verts), errs);
  if (tf.mode != JitterMode::None) revert_jitter(res.raw, original, errs);
  res.soup = tesselate_output(res.raw, original, cfg.tesselate, errs);
  res.stats.t_facets_s = seconds_since(t0);

  for (const Mesh& m : original) res.stats.m += m.F.size();
  res.stats.s = static_cast<uint64_t>(res.kd.split_count);
  for (const FinalVertex& v : res.raw.verts)
    if (v.prov.order >= 2) res.stats.h += 1;
  res.errors = errs;
  res.stats.errors = errs.total();
  return res;
}

Mesh soup_to_mesh(const PolySoup& soup) {
  Mesh m;
  std::unordered_map<int32_t, int32_t> remap;
  for (const Poly& p : soup.polys) {
    std::vector<int32_t> loop;
    loop.reserve(p.idx.size());
    for (int32_t v : p.idx) {
      auto [it, fresh] = remap.emplace(v, static_cast<int32_t>(m.V.size()));
      if (fresh) m.V.push_back(soup.V[v]);
      loop.push_back(it->second);
    }
    m.F.push_back(std::move(loop));
  }
  return m;
}

namespace {

// Pending evaluation group: meshes plus the expression over them. src tracks
// where each mesh came from (input index, or -1 for an intermediate result)
// so a repeated input stays one slot instead of two coincident copies.
struct Group {
  std::vector<Mesh> meshes;
  std::vector<int64_t> src;
  ExprPtr expr;
};

ExprPtr reindex(const ExprPtr& e, const std::vector<int>& map) {
  if (e->op == Expr::Op::Var) return Expr::make_var(map[e->var]);
  std::vector<ExprPtr> kids;
  kids.reserve(e->kids.size());
  for (const ExprPtr& k : e->kids) kids.push_back(reindex(k, map));
  return Expr::make(e->op, std::move(kids), e->k);
}

void accumulate(PipelineResult& agg, const PipelineResult& part) {
  agg.stats.m += part.stats.m;
  agg.stats.s += part.stats.s;
  agg.stats.h += part.stats.h;
  agg.stats.t_topology_s += part.stats.t_topology_s;
  agg.stats.t_vertices_s += part.stats.t_vertices_s;
  agg.stats.t_facets_s += part.stats.t_facets_s;
  agg.stats.errors += part.stats.errors;
  agg.errors += part.errors;
  agg.kd += part.kd;
}

}  // namespace

PipelineResult run_grouped(const std::vector<Mesh>& scene, const ExprPtr& tree, int grouping,
                           const PipelineConfig& cfg) {
  if (!tree || !is_binary_csg_tree(tree))
    throw std::invalid_argument("grouped evaluation needs a binary tree of & | - ^ over inputs");
  if (max_var(tree) >= static_cast<int>(scene.size()))
    throw std::invalid_argument("expression references more inputs than given");
  const size_t limit =
      grouping <= 0 ? std::numeric_limits<size_t>::max() : static_cast<size_t>(grouping);
  if (limit < 2) throw std::invalid_argument("grouping factor must be at least 2");

  PipelineResult agg;
  uint64_t invocation = 0;

  auto collapse = [&](Group&& g) -> Group {
    PipelineConfig cc = cfg;
    cc.tesselate = TesselateMode::Tri;  // the result must be a mesh again
    cc.seed = derive_seed(cfg.seed, invocation++);
    BoolFn fn = BoolFn::from_expr(g.expr, static_cast<int>(g.meshes.size()));
    PipelineResult part = run_pipeline(std::move(g.meshes), fn, cc);
    accumulate(agg, part);
    Mesh m = soup_to_mesh(part.soup);
    auto terrs = topology_pass(m);
    if (!terrs.empty())
      throw std::runtime_error("intermediate result is not a closed mesh (" +
                               std::to_string(terrs.size()) + " violations)");
    Group out;
    out.meshes.push_back(std::move(m));
    out.src.push_back(-1);
    out.expr = Expr::make_var(0);
    return out;
  };

  std::function<Group(const ExprPtr&)> walk = [&](const ExprPtr& e) -> Group {
    if (e->op == Expr::Op::Var) {
      Group g;
      g.meshes.push_back(scene[e->var]);
      g.src.push_back(e->var);
      g.expr = Expr::make_var(0);
      return g;
    }
    Group left = walk(e->kids[0]);
    Group right = walk(e->kids[1]);
    std::vector<int> map(right.meshes.size());
    for (size_t j = 0; j < right.meshes.size(); ++j) {
      int found = -1;
      if (right.src[j] >= 0)
        for (size_t i = 0; i < left.src.size(); ++i)
          if (left.src[i] == right.src[j]) {
            found = static_cast<int>(i);
            break;
          }
      if (found < 0) {
        found = static_cast<int>(left.meshes.size());
        left.meshes.push_back(std::move(right.meshes[j]));
        left.src.push_back(right.src[j]);
      }
      map[j] = found;
    }
    Group g;
    g.meshes = std::move(left.meshes);
    g.src = std::move(left.src);
    g.expr = Expr::make(e->op, {left.expr, reindex(right.expr, map)});
    if (g.meshes.size() >= limit) return collapse(std::move(g));
    return g;
  };

  Group root = walk(tree);
  BoolFn fn = BoolFn::from_expr(root.expr, static_cast<int>(root.meshes.size()));
  PipelineResult final_res = run_pipeline(std::move(root.meshes), fn, cfg);
  accumulate(agg, final_res);
  final_res.stats = agg.stats;
  final_res.errors = agg.errors;
  final_res.kd = agg.kd;
  return final_res;
}

}  // namespace ncsg
