#include "narycsg/predicates.h"

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace ncsg {

namespace {

// Crossing point of loop edge (va,vb) with plane (nq,dq), computed from the
// canonically ordered endpoints so both facets adjacent to the edge (and the
// brute-force and hierarchical paths) produce bit-identical coordinates.
Vec3 edge_plane_point(const Mesh& M, int32_t va, int32_t vb, const Vec3& nq, double dq) {
  if (va > vb) std::swap(va, vb);
  const Vec3& pa = M.V[va];
  const Vec3& pb = M.V[vb];
  double sa = nq.dot(pa) - dq;
  double sb = nq.dot(pb) - dq;
  double t = sa / (sa - sb);
  return pa + t * (pb - pa);
}

struct LineHit {
  double s;        // projection onto the segment direction
  SegEndpoint end;
};

// Clips the convex loop of (M,f) against plane (nq,dq): 0 or 2 transversal
// edge crossings. Returns -1 when any loop vertex sits on the plane within
// tolerance (degenerate contact).
int cross_loop_plane(const std::vector<Mesh>& scene, FacetRef fr, const Vec3& nq, double dq,
                     FacetRef crossed, const Vec3& dir, LineHit out[2]) {
  const Mesh& M = scene[fr.mesh];
  const auto& loop = M.F[fr.facet];
  const size_t n = loop.size();
  double tol_d = tol::planarity_rel * M.diameter[fr.facet];

  boost::container::small_vector<double, 8> sd(n);
  for (size_t k = 0; k < n; ++k) {
    sd[k] = nq.dot(M.V[loop[k]]) - dq;
    if (std::abs(sd[k]) <= tol_d) return -1;
  }
  int count = 0;
  for (size_t k = 0; k < n; ++k) {
    size_t k1 = (k + 1) % n;
    if ((sd[k] > 0) == (sd[k1] > 0)) continue;
    if (count == 2) return -1;  // non-convex numerics; treat as degenerate
    Vec3 p = edge_plane_point(M, loop[k], loop[k1], nq, dq);
    out[count++] = {dir.dot(p), {p, fr, int32_t(k), crossed}};
  }
  return count;
}

}  // namespace

std::optional<Segment> intersect2facets(const std::vector<Mesh>& scene, FacetRef a, FacetRef b,
                                        ErrorCounters& errs) {
  const Mesh& A = scene[a.mesh];
  const Mesh& B = scene[b.mesh];
  const Vec3& na = A.normal[a.facet];
  const Vec3& nb = B.normal[b.facet];
  double da = A.offset[a.facet];
  double db = B.offset[b.facet];
  double diam = std::max(A.diameter[a.facet], B.diameter[b.facet]);

  Vec3 cr = na.cross(nb);
  double len = cr.norm();
  if (len < tol::det3_rel) {
    // Parallel planes; coincident ones are a degeneracy worth recording.
    double dist = std::abs(da - (na.dot(nb) >= 0 ? db : -db));
    if (dist <= tol::planarity_rel * diam) ++errs.degeneracy;
    return std::nullopt;
  }
  Vec3 dir = cr / len;

  LineHit ha[2], hb[2];
  int ca = cross_loop_plane(scene, a, nb, db, b, dir, ha);
  if (ca < 0) {
    ++errs.degeneracy;
    return std::nullopt;
  }
  if (ca == 0) return std::nullopt;
  int cb = cross_loop_plane(scene, b, na, da, a, dir, hb);
  if (cb < 0) {
    ++errs.degeneracy;
    return std::nullopt;
  }
  if (cb == 0) return std::nullopt;

  if (ha[0].s > ha[1].s) std::swap(ha[0], ha[1]);
  if (hb[0].s > hb[1].s) std::swap(hb[0], hb[1]);

  double tie = tol::chain_tie_rel * diam;
  // Interval intersection; provenance follows whichever polygon bounds tighter.
  const LineHit& lo = ha[0].s >= hb[0].s ? ha[0] : hb[0];
  const LineHit& hi = ha[1].s <= hb[1].s ? ha[1] : hb[1];
  if (std::abs(ha[0].s - hb[0].s) <= tie || std::abs(ha[1].s - hb[1].s) <= tie) {
    ++errs.degeneracy;  // an endpoint lies on edges of both polygons
    return std::nullopt;
  }
  if (hi.s - lo.s <= tie) {
    if (hi.s - lo.s > -tie) ++errs.degeneracy;  // touching contact
    return std::nullopt;
  }
  return Segment{lo.end, hi.end, dir};
}

bool point_in_convex_polygon(const Vec3& p, std::span<const Vec3> loop, const Vec3& n,
                             double diameter, bool* boundary) {
  double tol_b = tol::planarity_rel * diameter * diameter;
  bool inside = true;
  bool near_edge = false;
  for (size_t k = 0; k < loop.size(); ++k) {
    const Vec3& va = loop[k];
    const Vec3& vb = loop[(k + 1) % loop.size()];
    double s = (vb - va).cross(p - va).dot(n);
    if (std::abs(s) <= tol_b) near_edge = true;
    if (s < -tol_b) inside = false;
  }
  if (boundary) *boundary = near_edge;
  return inside && !near_edge;
}

namespace {

bool point_in_facet(const Mesh& M, int32_t f, const Vec3& p, bool* boundary) {
  const auto& loop = M.F[f];
  const Vec3& n = M.normal[f];
  double tol_b = tol::planarity_rel * M.diameter[f] * M.diameter[f];
  bool inside = true;
  bool near_edge = false;
  for (size_t k = 0; k < loop.size(); ++k) {
    const Vec3& va = M.V[loop[k]];
    const Vec3& vb = M.V[loop[(k + 1) % loop.size()]];
    double s = (vb - va).cross(p - va).dot(n);
    if (std::abs(s) <= tol_b) near_edge = true;
    if (s < -tol_b) inside = false;
  }
  if (boundary) *boundary = near_edge;
  return inside && !near_edge;
}

}  // namespace

std::optional<Vec3> intersectSegmentFacet(const Segment& seg, const std::vector<Mesh>& scene,
                                          FacetRef c, ErrorCounters& errs) {
  const Mesh& C = scene[c.mesh];
  const Vec3& nc = C.normal[c.facet];
  double dc = C.offset[c.facet];
  double tol_d = tol::planarity_rel * C.diameter[c.facet];

  double sp = nc.dot(seg.e0.p) - dc;
  double sq = nc.dot(seg.e1.p) - dc;
  if (std::abs(sp) <= tol_d || std::abs(sq) <= tol_d) {
    ++errs.degeneracy;  // endpoint on plane or segment in plane
    return std::nullopt;
  }
  if ((sp > 0) == (sq > 0)) return std::nullopt;

  double t = sp / (sp - sq);
  Vec3 x = seg.e0.p + t * (seg.e1.p - seg.e0.p);
  bool boundary = false;
  if (!point_in_facet(C, c.facet, x, &boundary)) {
    if (boundary) ++errs.degeneracy;
    return std::nullopt;
  }
  if (boundary) {
    ++errs.degeneracy;
    return std::nullopt;
  }
  return x;
}

Vec3 seeded_unit_direction(const Vec3& x, uint64_t seed, int attempt) {
  std::mt19937_64 rng(hash_point_bits(x, seed) ^ (0xbf58476d1ce4e5b9ull * uint64_t(attempt + 1)));
  double z = 2.0 * unit_double(rng()) - 1.0;
  double phi = 2.0 * M_PI * unit_double(rng());
  double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec3(r * std::cos(phi), r * std::sin(phi), z);
}

std::optional<int> shoot_ray_global(const Vec3& x, const Mesh& mesh, uint64_t seed, double scale,
                                    ErrorCounters& errs) {
  for (int attempt = 0; attempt < tol::grazing_retries; ++attempt) {
    Vec3 dir = seeded_unit_direction(x, seed, attempt);
    int winding = 0;
    bool grazing = false;
    for (size_t f = 0; f < mesh.F.size() && !grazing; ++f) {
      const Vec3& n = mesh.normal[f];
      double denom = n.dot(dir);
      double sd = n.dot(x) - mesh.offset[f];
      if (std::abs(denom) < tol::det3_rel) {
        if (std::abs(sd) <= tol::planarity_rel * mesh.diameter[f]) grazing = true;
        continue;
      }
      double t = -sd / denom;
      if (t <= 0) continue;
      Vec3 hit = x + t * dir;
      bool boundary = false;
      bool inside = point_in_facet(mesh, int32_t(f), hit, &boundary);
      if (boundary) {
        grazing = true;
      } else if (inside) {
        if (t <= tol::chain_tie_rel * scale)
          grazing = true;  // x itself is within tolerance of the surface
        else
          winding += denom > 0 ? 1 : -1;
      }
    }
    if (!grazing) return winding > 0 ? 1 : 0;
  }
  ++errs.indicator_undecided;
  return std::nullopt;
}

std::optional<int> shoot_ray_local(const Vec3& x, std::span<const LocalFrag> frags,
                                   ErrorCounters& errs) {
  if (frags.empty()) {
    ++errs.degeneracy;
    return std::nullopt;
  }
  // Deterministic target: centroid of the fragment with the smallest source
  // ref (independent of traversal order).
  size_t pick = 0;
  for (size_t i = 1; i < frags.size(); ++i)
    if (frags[i].src < frags[pick].src) pick = i;
  Vec3 target = Vec3::Zero();
  for (const Vec3& p : frags[pick].poly) target += p;
  target /= double(frags[pick].poly.size());

  Vec3 dir = target - x;
  double len = dir.norm();
  if (len <= 0) {
    ++errs.degeneracy;
    return std::nullopt;
  }

  double best_t = std::numeric_limits<double>::infinity();
  double best_dot = 0;
  for (const LocalFrag& fr : frags) {
    double denom = fr.n.dot(dir);
    double sd = fr.n.dot(x) - fr.d;
    if (std::abs(denom) < tol::det3_rel * len) {
      if (std::abs(sd) <= tol::planarity_rel * fr.diameter) {
        ++errs.degeneracy;
        return std::nullopt;
      }
      continue;
    }
    double t = -sd / denom;
    if (t <= 0) continue;
    Vec3 hit = x + t * dir;
    bool boundary = false;
    bool inside = point_in_convex_polygon(hit, fr.poly, fr.n, fr.diameter, &boundary);
    if (boundary) {
      ++errs.degeneracy;
      return std::nullopt;
    }
    if (inside && t < best_t) {
      best_t = t;
      best_dot = denom;
    }
  }
  if (!std::isfinite(best_t)) {
    ++errs.degeneracy;  // target should have guaranteed a hit
    return std::nullopt;
  }
  return best_dot > 0 ? 1 : 0;
}

ClipResult clip_polygon_to_halfspace(std::span<const Vec3> loop, const Vec3& n, double d) {
  ClipResult r;
  const size_t count = loop.size();
  boost::container::small_vector<double, 8> sd(count);
  int strictly_below = 0, strictly_above = 0;
  for (size_t k = 0; k < count; ++k) {
    sd[k] = n.dot(loop[k]) - d;
    if (sd[k] < 0) ++strictly_below;
    if (sd[k] > 0) ++strictly_above;
  }
  if (strictly_above == 0) {
    // Entirely below or on the plane (a fully coplanar loop counts as below
    // so a split never silently drops geometry).
    r.below.assign(loop.begin(), loop.end());
    return r;
  }
  if (strictly_below == 0) {
    r.above.assign(loop.begin(), loop.end());
    return r;
  }
  for (size_t k = 0; k < count; ++k) {
    size_t k1 = (k + 1) % count;
    if (sd[k] <= 0) r.below.push_back(loop[k]);
    if (sd[k] >= 0) r.above.push_back(loop[k]);
    if ((sd[k] < 0 && sd[k1] > 0) || (sd[k] > 0 && sd[k1] < 0)) {
      double t = sd[k] / (sd[k] - sd[k1]);
      Vec3 p = loop[k] + t * (loop[k1] - loop[k]);
      r.below.push_back(p);
      r.above.push_back(p);
    }
  }
  if (r.below.size() < 3) r.below.clear();
  if (r.above.size() < 3) r.above.clear();
  return r;
}

}  // namespace ncsg
