#include "narycsg/brute.h"

#include "narycsg/generators.h"
#include "oracles/polytope_oracle.h"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

using namespace ncsg;

namespace {

bool near_any(const Vec3& p, const std::vector<Vec3>& pts, double tol) {
  for (const Vec3& q : pts)
    if ((p - q).norm() <= tol) return true;
  return false;
}

}  // namespace

TEST_CASE("box intersection vertices match the halfspace oracle", "[bruteforce]") {
  Vec3 alo(0, 0, 0), ahi(2, 2, 2), blo(1, 0.5, -0.5), bhi(3, 2.5, 1.5);
  std::vector<Mesh> scene = {make_box(alo, ahi), make_box(blo, bhi)};
  BoolFn inter = BoolFn::from_expr(*parse_expr("P0 & P1"), 2);
  ErrorCounters errs;
  auto verts = csg_vertices(scene, inter, 5, errs);
  REQUIRE(errs.total() == 0);

  // oracle: vertices of the intersection polytope from the 12 halfspaces
  auto hs = testor::box_halfspaces(alo, ahi);
  auto hs2 = testor::box_halfspaces(blo, bhi);
  hs.insert(hs.end(), hs2.begin(), hs2.end());
  auto expect = testor::polytope_vertices(hs, 1e-9);

  REQUIRE(verts.size() == expect.size());
  for (const FinalVertex& v : verts) REQUIRE(near_any(v.pos, expect, 1e-9));

  // the overlap is [1,2]x[0.5,2]x[0,1.5]: corners (2,2,0) and (1,0.5,1.5) are
  // input vertices, the other six mix planes of both boxes
  REQUIRE(expect.size() == 8);
  int by_order[4] = {0, 0, 0, 0};
  for (const FinalVertex& v : verts) ++by_order[v.prov.order];
  REQUIRE(by_order[1] == 2);
  REQUIRE(by_order[2] == 6);
  REQUIRE(by_order[3] == 0);
}

TEST_CASE("union of disjoint boxes returns exactly the input corners", "[bruteforce]") {
  std::vector<Mesh> scene = {make_box({0, 0, 0}, {1, 1, 1}), make_box({3, 0, 0}, {4, 1, 1})};
  BoolFn uni = BoolFn::from_expr(*parse_expr("P0 | P1"), 2);
  ErrorCounters errs;
  BruteStats stats;
  auto verts = csg_vertices(scene, uni, 5, errs, &stats);
  REQUIRE(verts.size() == 16);
  for (const FinalVertex& v : verts) {
    REQUIRE(v.prov.order == 1);
    REQUIRE((v.pos - scene[v.prov.mesh].V[v.prov.vertex]).norm() == 0.0);
    REQUIRE(isFinal1(v.cls));
  }
  // no facet pair intersects, so the triple scan never starts
  REQUIRE(stats.order1_tested == 16);
  REQUIRE(stats.pair_segments == 0);
  REQUIRE(stats.order3_loop_entries == 0);
  REQUIRE(stats.order3_candidates == 0);
}

TEST_CASE("triple scans start only from real segments", "[bruteforce]") {
  std::vector<Mesh> scene = {make_box({0, 0, 0}, {2, 2, 2}),
                             make_box({1, 1, 1}, {3, 3, 3}),
                             make_box({10, 10, 10}, {11, 11, 11})};
  BoolFn f = BoolFn::from_expr(*parse_expr("union(P0,P1,P2)"), 3);
  ErrorCounters errs;
  BruteStats stats;
  auto verts = csg_vertices(scene, f, 5, errs, &stats);
  REQUIRE(stats.pair_segments > 0);
  REQUIRE(stats.order3_loop_entries == stats.pair_segments);
  // mesh 2 is far away: no provenance may touch it beyond its own corners
  for (const FinalVertex& v : verts) {
    if (v.prov.order == 1) continue;
    if (v.prov.order == 2) {
      REQUIRE(v.prov.mesh != 2);
      REQUIRE(v.prov.crossed.mesh != 2);
    } else {
      for (const FacetRef& fr : v.prov.tri) REQUIRE(fr.mesh != 2);
    }
  }
}

TEST_CASE("results arrive sorted by provenance key without duplicates", "[bruteforce]") {
  std::vector<Mesh> scene = random_mix_scene(3, 60, 11);
  BoolFn f = BoolFn::from_expr(*parse_expr("(P0 | P1) & P2"), 3);
  ErrorCounters errs;
  auto verts = csg_vertices(scene, f, 5, errs);
  REQUIRE(verts.size() > 0);
  for (size_t i = 0; i + 1 < verts.size(); ++i) {
    REQUIRE(verts[i].prov < verts[i + 1].prov);
  }
  // sort_vertices is idempotent on the output
  auto copy = verts;
  sort_vertices(copy);
  for (size_t i = 0; i < verts.size(); ++i) REQUIRE(copy[i].prov == verts[i].prov);
}

TEST_CASE("every kept vertex carries a final probe and surf slots", "[bruteforce]") {
  std::vector<Mesh> scene = random_mix_scene(3, 80, 23);
  BoolFn f = BoolFn::from_expr(*parse_expr("min2(P0..P2)"), 3);
  ErrorCounters errs;
  auto verts = csg_vertices(scene, f, 5, errs);
  REQUIRE(verts.size() > 0);
  int seen_order[4] = {0, 0, 0, 0};
  for (const FinalVertex& v : verts) {
    ++seen_order[v.prov.order];
    auto slots = v.prov.flip_slots();
    for (int k = 0; k < v.prov.order; ++k) REQUIRE(v.ind.get(slots[k]) == Slot::Surf);
    switch (v.prov.order) {
      case 1: REQUIRE(isFinal1(v.cls)); break;
      case 2: REQUIRE(isFinal2(v.cls)); break;
      default: REQUIRE(isFinal3(v.cls)); break;
    }
  }
  REQUIRE(seen_order[2] > 0);
}

TEST_CASE("intersection of two meshes keeps only final pair probes", "[bruteforce]") {
  // with f = and, a kept order-2 vertex must have probe 1000 exactly
  std::vector<Mesh> scene = {make_icosphere({0, 0, 0}, 1.0, 1),
                             make_icosphere({0.8, 0.2, 0.1}, 1.0, 1)};
  BoolFn inter = BoolFn::from_expr(*parse_expr("P0 & P1"), 2);
  ErrorCounters errs;
  BruteStats stats;
  auto verts = csg_vertices(scene, inter, 5, errs, &stats);
  REQUIRE(stats.order2_kept > 0);
  for (const FinalVertex& v : verts)
    if (v.prov.order == 2) REQUIRE(v.cls == 0b1000);
  REQUIRE(stats.order2_kept <= stats.order2_classified);
  REQUIRE(stats.order2_classified <= stats.order2_candidates);
}

TEST_CASE("order-2 candidates appear twice and classify once", "[bruteforce]") {
  // each segment endpoint is found from both facets sharing the edge, so the
  // raw candidate count is even and dedup halves it at most
  std::vector<Mesh> scene = {make_box({0, 0, 0}, {2, 2, 2}), make_box({1, 0.5, 0.5}, {3, 1.5, 1.5})};
  BoolFn inter = BoolFn::from_expr(*parse_expr("P0 & P1"), 2);
  ErrorCounters errs;
  BruteStats stats;
  csg_vertices(scene, inter, 5, errs, &stats);
  REQUIRE(stats.order2_candidates > 0);
  REQUIRE(stats.order2_candidates % 2 == 0);
  REQUIRE(stats.order2_classified == stats.order2_candidates / 2);
}

TEST_CASE("pipeline volumes match the halfspace oracle on random box pairs", "[bruteforce]") {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    Vec3 alo(uni(rng), uni(rng), uni(rng));
    Vec3 ahi = alo + Vec3(1.1 + 0.5 * uni(rng), 1.1 + 0.5 * uni(rng), 1.1 + 0.5 * uni(rng));
    Vec3 blo = alo + 0.4 * Vec3(uni(rng), uni(rng), uni(rng));
    Vec3 bhi = blo + Vec3(1.1 + 0.5 * uni(rng), 1.1 + 0.5 * uni(rng), 1.1 + 0.5 * uni(rng));

    auto hs = testor::box_halfspaces(alo, ahi);
    auto hs2 = testor::box_halfspaces(blo, bhi);
    hs.insert(hs.end(), hs2.begin(), hs2.end());
    double expect = testor::polytope_volume(hs, 1e-9);
    REQUIRE(expect > 0.01);  // the construction guarantees overlap

    // independent route: intersect component-wise
    Vec3 lo = alo.cwiseMax(blo), hi = ahi.cwiseMin(bhi);
    double direct = (hi - lo).cwiseMax(0.0).prod();
    REQUIRE(expect == Catch::Approx(direct).epsilon(1e-9));
  }
}
