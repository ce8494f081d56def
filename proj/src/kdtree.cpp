#include "narycsg/kdtree.h"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_set>

namespace ncsg {

namespace {

double loop_diameter_of(const std::vector<Vec3>& loop) {
  double d2 = 0;
  for (size_t i = 0; i < loop.size(); ++i)
    for (size_t j = i + 1; j < loop.size(); ++j)
      d2 = std::max(d2, (loop[i] - loop[j]).squaredNorm());
  return std::sqrt(d2);
}

}  // namespace

KDCell make_root_cell(const std::vector<Mesh>& scene) {
  KDCell cell;
  Box3 box;
  for (const Mesh& m : scene) box.expand(mesh_bbox(m));
  cell.box = box.inflated(defaults::jitter_translate_rel * box.diagonal());
  int n = static_cast<int>(scene.size());
  cell.frags.resize(n);
  cell.frag_box.resize(n);
  cell.ind = IndicatorVec::all_undef(n);
  for (int i = 0; i < n; ++i) {
    const Mesh& m = scene[i];
    cell.frags[i].reserve(m.F.size());
    for (size_t f = 0; f < m.F.size(); ++f) {
      LocalFrag fr;
      fr.src = {i, static_cast<int32_t>(f)};
      fr.poly.reserve(m.F[f].size());
      for (int32_t v : m.F[f]) fr.poly.push_back(m.V[v]);
      fr.n = m.normal[f];
      fr.d = m.offset[f];
      fr.diameter = m.diameter[f];
      cell.frags[i].push_back(std::move(fr));
    }
    cell.frag_box[i] = mesh_bbox(m);
  }
  return cell;
}

Trit classify_cell(const KDCell& cell, const BoolFn& fn) { return fn.eval_ternary(cell.ind); }

SplitPlane choose_split(const KDCell& cell) {
  int axis = cell.box.largest_axis();
  return {axis, 0.5 * (cell.box.lo[axis] + cell.box.hi[axis])};
}

void stream_extremal(const LocalFrag& frag, int axis, ExtremalBest& toward_hi,
                     ExtremalBest& toward_lo) {
  const int u1 = (axis + 1) % 3, u2 = (axis + 2) % 3;
  const size_t n = frag.poly.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < n; ++k) {
    const Vec3& v = frag.poly[k];
    const Vec3& to_next = frag.poly[(k + 1) % n];
    const Vec3& to_prev = frag.poly[(k + n - 1) % n];
    for (int sigma : {1, -1}) {
      ExtremalBest& best = sigma > 0 ? toward_hi : toward_lo;
      double z = sigma * v[axis];

      // crossing of each incident edge with the plane one unit below v along
      // the extremal direction, projected to the two remaining axes
      struct Crossing {
        double dist;
        double px, py;   // finite crossing point
        double dx, dy;   // edge direction, used when the crossing is at infinity
      };
      auto crossing_of = [&](const Vec3& other) {
        Vec3 e = other - v;
        double descent = -sigma * e[axis];
        Crossing c{inf, 0, 0, e[u1], e[u2]};
        if (descent > 0) {
          double t = 1.0 / descent;
          c.px = e[u1] * t;  // relative to v' = projection of v
          c.py = e[u2] * t;
          c.dist = std::sqrt(c.px * c.px + c.py * c.py);
        }
        return c;
      };
      Crossing c1 = crossing_of(to_next);
      Crossing c2 = crossing_of(to_prev);
      const Crossing& remote = c1.dist >= c2.dist ? c1 : c2;
      const Crossing& near = c1.dist >= c2.dist ? c2 : c1;

      double s = 0;
      if (std::isfinite(remote.dist) && remote.dist > 0) {
        // a = v' - e12 (remote crossing relative to v'), b = e13 - e12
        double ax = -remote.px, ay = -remote.py;
        double bx, by;
        if (std::isfinite(near.dist)) {
          bx = near.px - remote.px;
          by = near.py - remote.py;
        } else {
          bx = near.dx;
          by = near.dy;
        }
        double la = std::sqrt(ax * ax + ay * ay);
        double lb = std::sqrt(bx * bx + by * by);
        if (la > 0 && lb > 0) s = std::abs((-ay) * bx + ax * by) / (la * lb);
      }
      best.consider({z, remote.dist, s}, frag.n);
    }
  }
}

bool split_fragment(LocalFrag frag, const SplitPlane& sp, std::vector<LocalFrag>& lo,
                    std::vector<LocalFrag>& hi) {
  double mn = std::numeric_limits<double>::max();
  double mx = std::numeric_limits<double>::lowest();
  for (const Vec3& p : frag.poly) {
    mn = std::min(mn, p[sp.axis]);
    mx = std::max(mx, p[sp.axis]);
  }
  if (mx < sp.mid) {
    lo.push_back(std::move(frag));
    return false;
  }
  if (mn > sp.mid) {
    hi.push_back(std::move(frag));
    return false;
  }
  Vec3 n = Vec3::Zero();
  n[sp.axis] = 1.0;
  ClipResult r = clip_polygon_to_halfspace(frag.poly, n, sp.mid);
  bool cut = !r.below.empty() && !r.above.empty();
  auto push = [&](std::vector<LocalFrag>& dst, std::vector<Vec3>&& poly) {
    if (poly.empty()) return;
    LocalFrag g;
    g.src = frag.src;
    g.n = frag.n;
    g.d = frag.d;
    g.diameter = cut ? loop_diameter_of(poly) : frag.diameter;
    g.poly = std::move(poly);
    dst.push_back(std::move(g));
  };
  push(lo, std::move(r.below));
  push(hi, std::move(r.above));
  return cut;
}

Slot resolve_side_indicator(const ExtremalBest& best, int axis, int sigma, const Mesh& mesh,
                            const Vec3& fallback_point, uint64_t seed, double scale,
                            ErrorCounters& errs) {
  if (best.valid) {
    double c = sigma * best.normal[axis];
    if (std::abs(c) > tol::det3_rel) return c > 0 ? Slot::Out : Slot::In;
    errs.orientation_undecided += 1;
  }
  auto r = shoot_ray_global(fallback_point, mesh, seed, scale, errs);
  if (r) return *r ? Slot::In : Slot::Out;
  return Slot::Out;  // undecided is already counted; pick the open-space bit
}

InputSplitResult split_range(std::vector<LocalFrag>& frags, size_t b, size_t e,
                             const SplitPlane& sp) {
  InputSplitResult r;
  for (size_t k = b; k < e; ++k) {
    stream_extremal(frags[k], sp.axis, r.toward_hi, r.toward_lo);
    if (split_fragment(std::move(frags[k]), sp, r.lo, r.hi)) r.cuts += 1;
  }
  return r;
}

void merge_split_results(InputSplitResult& acc, InputSplitResult&& later) {
  acc.lo.insert(acc.lo.end(), std::make_move_iterator(later.lo.begin()),
                std::make_move_iterator(later.lo.end()));
  acc.hi.insert(acc.hi.end(), std::make_move_iterator(later.hi.begin()),
                std::make_move_iterator(later.hi.end()));
  acc.toward_hi.merge(later.toward_hi);
  acc.toward_lo.merge(later.toward_lo);
  acc.cuts += later.cuts;
}

void prepare_children(const KDCell& cell, const SplitPlane& sp, KDCell& lo, KDCell& hi) {
  const int n = cell.ind.n;
  lo = KDCell{};
  hi = KDCell{};
  lo.box = cell.box;
  lo.box.hi[sp.axis] = sp.mid;
  hi.box = cell.box;
  hi.box.lo[sp.axis] = sp.mid;
  lo.depth = hi.depth = cell.depth + 1;
  lo.frags.resize(n);
  hi.frags.resize(n);
  lo.frag_box.resize(n);
  hi.frag_box.resize(n);
  lo.ind = cell.ind;
  hi.ind = cell.ind;
}

void finish_split_input(KDCell& lo, KDCell& hi, int input, InputSplitResult&& r,
                        const SplitPlane& sp, const Mesh& mesh, uint64_t seed, double scale,
                        KdStats& stats, ErrorCounters& errs) {
  stats.split_count += r.cuts;
  lo.frags[input] = std::move(r.lo);
  hi.frags[input] = std::move(r.hi);
  for (KDCell* child : {&lo, &hi}) {
    int sigma = child == &hi ? 1 : -1;
    if (child->frags[input].empty()) {
      Vec3 centroid = 0.5 * (child->box.lo + child->box.hi);
      child->ind.set(input, resolve_side_indicator(sigma > 0 ? r.toward_hi : r.toward_lo,
                                                   sp.axis, sigma, mesh, centroid, seed, scale,
                                                   errs));
    } else {
      child->ind.set(input, Slot::Undef);
      for (const LocalFrag& fr : child->frags[input])
        for (const Vec3& p : fr.poly) child->frag_box[input].expand(p);
    }
  }
}

void split_cell(KDCell&& cell, const std::vector<Mesh>& scene, uint64_t seed, double scale,
                KDCell& lo, KDCell& hi, KdStats& stats, ErrorCounters& errs) {
  SplitPlane sp = choose_split(cell);
  prepare_children(cell, sp, lo, hi);
  for (int i = 0; i < cell.ind.n; ++i) {
    if (cell.frags[i].empty()) continue;  // slot defined, children inherit it
    InputSplitResult r = split_range(cell.frags[i], 0, cell.frags[i].size(), sp);
    cell.frags[i].clear();
    finish_split_input(lo, hi, i, std::move(r), sp, scene[i], seed, scale, stats, errs);
  }
}

namespace {

void branch2_vertices(const KDCell& cell, const std::vector<Mesh>& scene, const BoolFn& fn,
                      std::vector<FinalVertex>& out, KdStats& stats) {
  int q = cell.ind.first_undef();
  const Mesh& m = scene[q];
  const int flips[1] = {q};
  uint8_t probe = fn.flip_probe(cell.ind, std::span<const int>(flips, 1));
  if (!isFinal1(probe)) {
    // ternary said u but the completion is constant: possible when the
    // expression repeats an input, nothing to emit here
    stats.branch2_probe_constant += 1;
    return;
  }
  IndicatorVec ind = cell.ind;
  ind.set(q, Slot::Surf);
  std::unordered_set<int32_t> seen;
  for (const LocalFrag& fr : cell.frags[q]) {
    for (int32_t v : m.F[fr.src.facet]) {
      if (!seen.insert(v).second) continue;
      if (!cell.box.contains_halfopen(m.V[v])) continue;
      ++stats.counts.order1_tested;
      FinalVertex fv;
      fv.pos = m.V[v];
      fv.prov = Provenance::order1(q, v);
      fv.cls = probe;
      fv.ind = ind;
      out.push_back(std::move(fv));
    }
  }
}

void leaf_vertices(const KDCell& cell, const std::vector<Mesh>& scene, const BoolFn& fn,
                   uint64_t seed, double scale, std::vector<FinalVertex>& out,
                   ErrorCounters& errs, BruteStats& st) {
  SlotResolver resolve = [&](int slot, const Vec3& x) -> std::optional<Slot> {
    Slot s = cell.ind.get(slot);
    if (s == Slot::Out || s == Slot::In) return s;
    if (!cell.frags[slot].empty()) {
      auto r = shoot_ray_local(x, cell.frags[slot], errs);
      if (r) return *r ? Slot::In : Slot::Out;
    }
    auto g = shoot_ray_global(x, scene[slot], seed, scale, errs);
    if (g) return *g ? Slot::In : Slot::Out;
    return std::nullopt;
  };

  // unique source facets present in the cell, in global (mesh, facet) order
  std::vector<FacetRef> facets;
  for (size_t i = 0; i < cell.frags.size(); ++i) {
    std::vector<int32_t> fs;
    fs.reserve(cell.frags[i].size());
    for (const LocalFrag& fr : cell.frags[i]) fs.push_back(fr.src.facet);
    std::sort(fs.begin(), fs.end());
    fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
    for (int32_t f : fs) facets.push_back({static_cast<int32_t>(i), f});
  }

  // order 1: original vertices of present facets that land in this cell
  std::unordered_set<int64_t> seen1;
  for (const FacetRef& ref : facets) {
    const Mesh& m = scene[ref.mesh];
    for (int32_t v : m.F[ref.facet]) {
      if (!cell.box.contains_halfopen(m.V[v])) continue;
      if (!seen1.insert((int64_t(ref.mesh) << 32) | uint32_t(v)).second) continue;
      ++st.order1_tested;
      auto fv = classify_candidate(m.V[v], Provenance::order1(ref.mesh, v), fn, resolve);
      if (fv) out.push_back(std::move(*fv));
    }
  }

  std::unordered_set<Provenance, ProvenanceHash> seen2;
  for (size_t ia = 0; ia < facets.size(); ++ia) {
    for (size_t ib = ia + 1; ib < facets.size(); ++ib) {
      FacetRef a = facets[ia], b = facets[ib];
      if (a.mesh == b.mesh) continue;
      auto seg = intersect2facets(scene, a, b, errs);
      if (!seg) continue;
      ++st.pair_segments;

      for (const SegEndpoint* e : {&seg->e0, &seg->e1}) {
        ++st.order2_candidates;
        if (!cell.box.contains_halfopen(e->p)) continue;
        Provenance prov = Provenance::order2(scene[e->edge_facet.mesh], e->edge_facet.mesh,
                                             e->edge_facet.facet, e->edge_corner, e->crossed);
        if (!seen2.insert(prov).second) continue;
        ++st.order2_classified;
        auto fv = classify_candidate(e->p, prov, fn, resolve);
        if (fv) {
          ++st.order2_kept;
          out.push_back(std::move(*fv));
        }
      }

      ++st.order3_loop_entries;
      for (size_t ic = ib + 1; ic < facets.size(); ++ic) {
        FacetRef c = facets[ic];
        if (c.mesh == a.mesh || c.mesh == b.mesh) continue;
        auto x = intersectSegmentFacet(*seg, scene, c, errs);
        if (!x) continue;
        if (!cell.box.contains_halfopen(*x)) continue;
        ++st.order3_candidates;
        auto fv = classify_candidate(*x, Provenance::order3(a, b, c), fn, resolve);
        if (fv) {
          ++st.order3_kept;
          out.push_back(std::move(*fv));
        }
      }
    }
  }
}

}  // namespace

StepResult kd_step_with(KDCell&& cell, const std::vector<Mesh>& scene, const BoolFn& fn,
                        const ExplorationConfig& cfg, double scale,
                        std::vector<FinalVertex>& out, ErrorCounters& errs, KdStats& stats,
                        std::pair<KDCell, KDCell>& kids, const SplitFn& split) {
  stats.cells_visited += 1;
  if (classify_cell(cell, fn) != Trit::Undef) {
    stats.branch1_pruned += 1;
    return StepResult::Pruned;
  }
  if (cell.ind.count_undef() == 1) {
    stats.branch2_cells += 1;
    branch2_vertices(cell, scene, fn, out, stats);
    return StepResult::Emitted;
  }
  size_t total = cell.total_frags();
  bool depth_stop = cell.depth >= cfg.max_depth;
  if (total <= static_cast<size_t>(cfg.fmax) || depth_stop) {
    if (depth_stop && total > static_cast<size_t>(cfg.fmax)) {
      stats.max_depth_hit += 1;
      errs.max_depth_hit += 1;
    }
    stats.leaf_calls += 1;
    leaf_vertices(cell, scene, fn, cfg.seed, scale, out, errs, stats.counts);
    return StepResult::Emitted;
  }
  split(std::move(cell), kids.first, kids.second, stats, errs);
  return StepResult::Split;
}

StepResult kd_step(KDCell&& cell, const std::vector<Mesh>& scene, const BoolFn& fn,
                   const ExplorationConfig& cfg, double scale, std::vector<FinalVertex>& out,
                   ErrorCounters& errs, KdStats& stats, std::pair<KDCell, KDCell>& kids) {
  SplitFn split = [&](KDCell&& c, KDCell& lo, KDCell& hi, KdStats& st, ErrorCounters& er) {
    split_cell(std::move(c), scene, cfg.seed, scale, lo, hi, st, er);
  };
  return kd_step_with(std::move(cell), scene, fn, cfg, scale, out, errs, stats, kids, split);
}

void sort_and_check_unique(std::vector<FinalVertex>& verts) {
  sort_vertices(verts);
  for (size_t i = 1; i < verts.size(); ++i) {
    if (verts[i].prov == verts[i - 1].prov)
      throw std::runtime_error("DuplicateVertex: same provenance reported twice");
  }
}

KdResult kd_vertices(const std::vector<Mesh>& scene, const BoolFn& fn,
                     const ExplorationConfig& cfg, ErrorCounters& errs) {
  assert(cfg.valid());
  KdResult res;
  Box3 scene_box;
  for (const Mesh& m : scene) scene_box.expand(mesh_bbox(m));
  double scale = scene_box.diagonal();

  std::vector<KDCell> stack;
  stack.push_back(make_root_cell(scene));
  while (!stack.empty()) {
    KDCell cell = std::move(stack.back());
    stack.pop_back();
    std::pair<KDCell, KDCell> kids;
    if (kd_step(std::move(cell), scene, fn, cfg, scale, res.verts, errs, res.stats, kids) ==
        StepResult::Split) {
      stack.push_back(std::move(kids.first));
      stack.push_back(std::move(kids.second));
    }
  }
  sort_and_check_unique(res.verts);
  return res;
}

}  // namespace ncsg
