#include "narycsg/reconstruct.h"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace ncsg {

namespace {

constexpr double kAngleEps = 1e-9;

// Boundary ray of an angular sector at a vertex, within a host plane.
// key names the facet pair whose canonical direction equals +dir.
struct SectorRay {
  Vec3 dir;
  DirKey key;
  double ang = 0.0;
};

// One angular sector between rays[rb] and rays[re] (CCW around the host
// normal). theta 0 means the sector does not contribute to the output.
struct SectorInfo {
  int rb = 0, re = 0;
  int theta = 0;
};

int8_t sector_theta(uint8_t cls, int above_bit, int below_bit) {
  int above = (cls >> above_bit) & 1;
  int below = (cls >> below_bit) & 1;
  if (above == below) return 0;
  return below == 1 ? int8_t{1} : int8_t{-1};
}

void emit_piece(int32_t vertex, FacetRef host, int8_t theta, const SectorRay& rb,
                const SectorRay& re, std::vector<Looplet>& out) {
  if (rb.key == re.key.rev()) return;  // straight boundary, no corner here
  Looplet lp;
  lp.vertex = vertex;
  lp.host = host;
  lp.theta = theta;
  if (theta > 0) {
    lp.out_dir = rb.dir;
    lp.out_key = rb.key;
    lp.in_dir = -re.dir;
    lp.in_key = re.key.rev();
  } else {
    lp.out_dir = re.dir;
    lp.out_key = re.key;
    lp.in_dir = -rb.dir;
    lp.in_key = rb.key.rev();
  }
  out.push_back(lp);
}

// Merges runs of adjacent sectors with equal theta and emits one looplet per
// run. `full` hosts wrap around; half-plane hosts do not.
void merge_and_emit(int32_t vertex, FacetRef host, const std::vector<SectorRay>& rays,
                    std::vector<SectorInfo>& secs, bool full, std::vector<Looplet>& out,
                    ErrorCounters& errs) {
  int n = static_cast<int>(secs.size());
  int start = 0;
  if (full) {
    start = -1;
    for (int i = 0; i < n; ++i) {
      int prev = (i + n - 1) % n;
      if (secs[i].theta == 0 || secs[i].theta != secs[prev].theta) {
        start = i;
        break;
      }
    }
    if (start < 0) {
      // every sector kept with one orientation: the vertex is not on the
      // output boundary at all and should not have been classified as final
      errs.degeneracy += 1;
      return;
    }
  }
  int i = 0;
  while (i < n) {
    int si = (start + i) % n;
    if (secs[si].theta == 0) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && secs[(start + j + 1) % n].theta == secs[si].theta) ++j;
    int sj = (start + j) % n;
    emit_piece(vertex, host, static_cast<int8_t>(secs[si].theta), rays[secs[si].rb],
               rays[secs[sj].re], out);
    i = j + 1;
  }
}

Vec3 dir_at_angle(const Vec3& ex, const Vec3& ey, double ang) {
  return std::cos(ang) * ex + std::sin(ang) * ey;
}

double angle_in_frame(const Vec3& d, const Vec3& ex, const Vec3& ey) {
  double a = std::atan2(d.dot(ey), d.dot(ex));
  if (a < 0) a += 2.0 * M_PI;
  return a;
}

// Half-plane host of an order-2 vertex: facet `host` of the edge-owner mesh,
// with boundary along the edge. exd is the boundary ray at angle 0 chosen so
// the facet interior lies at angles (0, pi). key0/key1 are the keys of exd
// and -exd. The crossing facet C cuts the half-plane with one interior ray.
void order2_edge_host(int32_t vertex, FacetRef host, const Vec3& n, const Vec3& exd,
                      const DirKey& key0, const DirKey& key1, FacetRef C, const Vec3& nC,
                      const DirKey& trace_pos, uint8_t cls, std::vector<Looplet>& out,
                      ErrorCounters& errs) {
  Vec3 ey = n.cross(exd);
  Vec3 line = n.cross(nC);
  double len = line.norm();
  if (len < tol::det3_rel) {
    errs.degeneracy += 1;
    return;
  }
  line /= len;
  double side = line.dot(ey);
  if (std::abs(side) < kAngleEps) {
    errs.degeneracy += 1;  // crossing trace runs along the edge
    return;
  }
  Vec3 rho = side > 0 ? line : Vec3(-line);
  DirKey rho_key = side > 0 ? trace_pos : trace_pos.rev();

  std::vector<SectorRay> rays(3);
  rays[0] = {exd, key0, 0.0};
  rays[1] = {rho, rho_key, angle_in_frame(rho, exd, ey)};
  rays[2] = {-exd, key1, M_PI};

  std::vector<SectorInfo> secs(2);
  for (int s = 0; s < 2; ++s) {
    secs[s] = {s, s + 1, 0};
    double mid = 0.5 * (rays[s].ang + rays[s + 1].ang);
    Vec3 w = dir_at_angle(exd, ey, mid);
    double dc = w.dot(nC);
    if (std::abs(dc) < kAngleEps) {
      errs.degeneracy += 1;
      return;
    }
    int j = dc > 0 ? 0 : 1;
    secs[s].theta = sector_theta(cls, (0 << 1) | j, (1 << 1) | j);
  }
  merge_and_emit(vertex, host, rays, secs, false, out, errs);
}

}  // namespace

void looplets_order2_kernel(int32_t vertex, const Vec3& g, FacetRef A, const Vec3& nA, FacetRef B,
                            const Vec3& nB, FacetRef C, const Vec3& nC, uint8_t cls,
                            std::vector<Looplet>& out, ErrorCounters& errs) {
  // hosts A and B: half-planes bounded by the edge line
  order2_edge_host(vertex, A, nA, g, DirKey{A, B}, DirKey{B, A}, C, nC, DirKey{A, C}, cls, out,
                   errs);
  order2_edge_host(vertex, B, nB, -g, DirKey{B, A}, DirKey{A, B}, C, nC, DirKey{B, C}, cls, out,
                   errs);

  // host C: full plane cut by the wedge of the edge-owner mesh
  Vec3 uA = nA.cross(g);   // interior of half-plane A
  Vec3 uB = g.cross(nB);   // interior of half-plane B
  Vec3 lineA = nA.cross(nC);
  Vec3 lineB = nB.cross(nC);
  double lenA = lineA.norm(), lenB = lineB.norm();
  if (lenA < tol::det3_rel || lenB < tol::det3_rel) {
    errs.degeneracy += 1;
    return;
  }
  lineA /= lenA;
  lineB /= lenB;
  double sideA = lineA.dot(uA);
  double sideB = lineB.dot(uB);
  if (std::abs(sideA) < kAngleEps || std::abs(sideB) < kAngleEps) {
    errs.degeneracy += 1;
    return;
  }
  Vec3 rayA = sideA > 0 ? lineA : Vec3(-lineA);
  DirKey keyA = sideA > 0 ? DirKey{A, C} : DirKey{C, A};
  Vec3 rayB = sideB > 0 ? lineB : Vec3(-lineB);
  DirKey keyB = sideB > 0 ? DirKey{B, C} : DirKey{C, B};

  Vec3 ex = rayA;
  Vec3 ey = nC.cross(ex);
  double angB = angle_in_frame(rayB, ex, ey);
  if (angB < kAngleEps || angB > 2.0 * M_PI - kAngleEps) {
    errs.degeneracy += 1;
    return;
  }

  std::vector<SectorRay> rays(2);
  rays[0] = {rayA, keyA, 0.0};
  rays[1] = {rayB, keyB, angB};

  bool convex = uB.dot(nA) <= 0.0;
  std::vector<SectorInfo> secs(2);
  int prev_i = -1;
  for (int s = 0; s < 2; ++s) {
    double a0 = rays[s].ang;
    double a1 = s == 0 ? rays[1].ang : 2.0 * M_PI;
    secs[s] = {s, (s + 1) % 2, 0};
    Vec3 w = dir_at_angle(ex, ey, 0.5 * (a0 + a1));
    bool inside = convex ? (w.dot(nA) < 0 && w.dot(nB) < 0) : (w.dot(nA) < 0 || w.dot(nB) < 0);
    int i = inside ? 1 : 0;
    if (i == prev_i) {
      errs.degeneracy += 1;  // wedge failed to separate the two sectors
      return;
    }
    prev_i = i;
    secs[s].theta = sector_theta(cls, (i << 1) | 0, (i << 1) | 1);
  }
  merge_and_emit(vertex, C, rays, secs, true, out, errs);
}

namespace {

// One full-plane host of an order-3 vertex, cut by the other two planes.
void order3_host(int32_t vertex, FacetRef host, const Vec3& n, FacetRef P, const Vec3& nP,
                 FacetRef Q, const Vec3& nQ, int own_shift, int p_shift, int q_shift, uint8_t cls,
                 std::vector<Looplet>& out, ErrorCounters& errs) {
  Vec3 lineP = n.cross(nP);
  Vec3 lineQ = n.cross(nQ);
  double lenP = lineP.norm(), lenQ = lineQ.norm();
  if (lenP < tol::det3_rel || lenQ < tol::det3_rel) {
    errs.degeneracy += 1;
    return;
  }
  lineP /= lenP;
  lineQ /= lenQ;

  Vec3 ex = lineP;
  Vec3 ey = n.cross(ex);
  double aq = angle_in_frame(lineQ, ex, ey);
  if (aq < kAngleEps || std::abs(aq - M_PI) < kAngleEps || aq > 2.0 * M_PI - kAngleEps) {
    errs.degeneracy += 1;  // the two cutting traces coincide on this host
    return;
  }

  std::vector<SectorRay> rays = {
      {lineP, DirKey{host, P}, 0.0},
      {lineQ, DirKey{host, Q}, aq},
      {-lineP, DirKey{P, host}, M_PI},
      {-lineQ, DirKey{Q, host}, aq < M_PI ? aq + M_PI : aq - M_PI},
  };
  std::sort(rays.begin(), rays.end(),
            [](const SectorRay& a, const SectorRay& b) { return a.ang < b.ang; });

  std::vector<SectorInfo> secs(4);
  for (int s = 0; s < 4; ++s) {
    double a0 = rays[s].ang;
    double a1 = s == 3 ? rays[0].ang + 2.0 * M_PI : rays[s + 1].ang;
    Vec3 w = dir_at_angle(ex, ey, 0.5 * (a0 + a1));
    double dp = w.dot(nP), dq = w.dot(nQ);
    if (std::abs(dp) < kAngleEps || std::abs(dq) < kAngleEps) {
      errs.degeneracy += 1;
      return;
    }
    int bp = dp > 0 ? 0 : 1;
    int bq = dq > 0 ? 0 : 1;
    int above = (0 << own_shift) | (bp << p_shift) | (bq << q_shift);
    int below = (1 << own_shift) | (bp << p_shift) | (bq << q_shift);
    secs[s] = {s, (s + 1) % 4, sector_theta(cls, above, below)};
  }
  merge_and_emit(vertex, host, rays, secs, true, out, errs);
}

}  // namespace

void looplets_order3_kernel(int32_t vertex, FacetRef A, const Vec3& nA, FacetRef B, const Vec3& nB,
                            FacetRef C, const Vec3& nC, uint8_t cls, std::vector<Looplet>& out,
                            ErrorCounters& errs) {
  order3_host(vertex, A, nA, B, nB, C, nC, 2, 1, 0, cls, out, errs);
  order3_host(vertex, B, nB, A, nA, C, nC, 1, 2, 0, cls, out, errs);
  order3_host(vertex, C, nC, A, nA, B, nB, 0, 2, 1, cls, out, errs);
}

std::vector<Looplet> make_looplets(const std::vector<Mesh>& scene,
                                   const std::vector<FinalVertex>& verts, ErrorCounters& errs) {
  std::vector<Looplet> out;
  for (int32_t vi = 0; vi < static_cast<int32_t>(verts.size()); ++vi) {
    const FinalVertex& fv = verts[vi];
    const Provenance& p = fv.prov;
    switch (p.order) {
      case 1: {
        const Mesh& m = scene[p.mesh];
        int b0 = fv.cls & 1, b1 = (fv.cls >> 1) & 1;
        assert(b0 != b1);
        int8_t theta = (b1 == 1 && b0 == 0) ? 1 : -1;
        for (const auto& [f, k] : m.incident[p.vertex]) {
          const auto& loop = m.F[f];
          int sz = static_cast<int>(loop.size());
          int kprev = (k + sz - 1) % sz;
          int knext = (k + 1) % sz;
          Vec3 v = m.V[loop[k]];
          Vec3 tn = (m.V[loop[knext]] - v).normalized();
          Vec3 tp = (m.V[loop[kprev]] - v).normalized();
          FacetRef F{p.mesh, f};
          FacetRef Gn{p.mesh, m.opp[f][k]};
          FacetRef Gp{p.mesh, m.opp[f][kprev]};
          Looplet lp;
          lp.vertex = vi;
          lp.host = F;
          lp.theta = theta;
          if (theta > 0) {
            lp.out_dir = tn;
            lp.out_key = {F, Gn};
            lp.in_dir = -tp;
            lp.in_key = {F, Gp};
          } else {
            lp.out_dir = tp;
            lp.out_key = {Gp, F};
            lp.in_dir = -tn;
            lp.in_key = {Gn, F};
          }
          out.push_back(lp);
        }
        break;
      }
      case 2: {
        const Mesh& m = scene[p.mesh];
        Vec3 g = (m.V[p.vb] - m.V[p.va]).normalized();
        FacetRef A{p.mesh, p.facet_left};
        FacetRef B{p.mesh, p.facet_right};
        const Mesh& mc = scene[p.crossed.mesh];
        looplets_order2_kernel(vi, g, A, m.normal[p.facet_left], B, m.normal[p.facet_right],
                               p.crossed, mc.normal[p.crossed.facet], fv.cls, out, errs);
        break;
      }
      case 3: {
        const Vec3& nA = scene[p.tri[0].mesh].normal[p.tri[0].facet];
        const Vec3& nB = scene[p.tri[1].mesh].normal[p.tri[1].facet];
        const Vec3& nC = scene[p.tri[2].mesh].normal[p.tri[2].facet];
        looplets_order3_kernel(vi, p.tri[0], nA, p.tri[1], nB, p.tri[2], nC, fv.cls, out, errs);
        break;
      }
      default:
        assert(false);
    }
  }
  return out;
}

namespace {

struct ChainNode {
  Looplet lp;
  double off = 0.0;  // position along the canonical direction of in_key
};

bool node_order_pre(const ChainNode& a, const ChainNode& b) {
  if (a.lp.host != b.lp.host) return a.lp.host < b.lp.host;
  if (a.lp.theta != b.lp.theta) return a.lp.theta < b.lp.theta;
  if (a.lp.in_key != b.lp.in_key) return a.lp.in_key < b.lp.in_key;
  return a.lp.vertex < b.lp.vertex;
}

bool node_order_off(const ChainNode& a, const ChainNode& b) {
  if (a.lp.in_key != b.lp.in_key) return a.lp.in_key < b.lp.in_key;
  if (a.off != b.off) return a.off < b.off;
  return a.lp.vertex < b.lp.vertex;
}

}  // namespace

OutputMesh csg_facets(const std::vector<Mesh>& scene, std::vector<FinalVertex> verts,
                      ErrorCounters& errs) {
  std::sort(verts.begin(), verts.end(),
            [](const FinalVertex& a, const FinalVertex& b) { return a.prov < b.prov; });
  OutputMesh om;
  om.verts = std::move(verts);

  std::vector<Looplet> lps = make_looplets(scene, om.verts, errs);

  Box3 box;
  for (const Mesh& m : scene) box.expand(mesh_bbox(m));
  double tie = tol::chain_tie_rel * box.diagonal();

  std::vector<ChainNode> nodes(lps.size());
  for (size_t i = 0; i < lps.size(); ++i) nodes[i].lp = lps[i];
  std::sort(nodes.begin(), nodes.end(), node_order_pre);

  size_t b0 = 0;
  while (b0 < nodes.size()) {
    size_t b1 = b0;
    while (b1 < nodes.size() && nodes[b1].lp.host == nodes[b0].lp.host &&
           nodes[b1].lp.theta == nodes[b0].lp.theta)
      ++b1;
    int n = static_cast<int>(b1 - b0);
    auto* nb = nodes.data() + b0;

    // groups share an in_key; offsets measured along the group axis, which is
    // bitwise identical to every member's in_dir and every matching out_dir
    struct Group {
      DirKey key;
      int lo, hi;
      Vec3 axis;
    };
    std::vector<Group> groups;
    for (int i = 0; i < n;) {
      int j = i;
      while (j < n && nb[j].lp.in_key == nb[i].lp.in_key) ++j;
      Group g{nb[i].lp.in_key, i, j, nb[i].lp.in_dir};
      for (int k = i; k < j; ++k) nb[k].off = g.axis.dot(om.verts[nb[k].lp.vertex].pos);
      groups.push_back(g);
      i = j;
    }
    std::sort(nb, nb + n, node_order_off);

    std::vector<char> alive(n, 1);
    std::vector<int> skip(n + 1);
    for (int i = 0; i <= n; ++i) skip[i] = i + 1;
    auto find_alive = [&](int i, int hi) {
      int j = i;
      while (j < hi && !alive[j]) j = std::min(skip[j], hi);
      int k = i;
      while (k < j) {
        int t = std::min(skip[k], hi);
        skip[k] = j;
        k = t;
      }
      return j;
    };
    auto group_of = [&](const DirKey& k) -> const Group* {
      auto it = std::lower_bound(groups.begin(), groups.end(), k,
                                 [](const Group& g, const DirKey& key) { return g.key < key; });
      if (it == groups.end() || !(it->key == k)) return nullptr;
      return &*it;
    };

    std::vector<OutLoop> loops;
    std::vector<int> chain;
    for (int seed = 0; seed < n; ++seed) {
      if (!alive[seed]) continue;
      chain.clear();
      chain.push_back(seed);
      int cur = seed;
      while (true) {
        const Group* g = group_of(nb[cur].lp.out_key);
        int next = -1;
        if (g) {
          double s0 = g->axis.dot(om.verts[nb[cur].lp.vertex].pos);
          int j = static_cast<int>(
              std::upper_bound(nb + g->lo, nb + g->hi, s0,
                               [](double v, const ChainNode& c) { return v < c.off; }) -
              nb);
          j = find_alive(j, g->hi);
          if (j < g->hi) {
            next = j;
            int j2 = find_alive(j + 1, g->hi);
            if (j2 < g->hi && nb[j2].off - nb[j].off <= tie) errs.ambiguous_chain += 1;
          }
        }
        if (next < 0) {
          errs.incomplete_loop += 1;
          alive[seed] = 0;
          break;
        }
        if (next == seed) {
          alive[seed] = 0;
          if (chain.size() >= 3) {
            OutLoop loop;
            loop.v.reserve(chain.size());
            for (int c : chain) loop.v.push_back(nb[c].lp.vertex);
            loops.push_back(std::move(loop));
          } else {
            errs.degeneracy += 1;
          }
          break;
        }
        alive[next] = 0;
        chain.push_back(next);
        cur = next;
      }
    }
    if (!loops.empty()) {
      OutFacet f;
      f.src = nb[0].lp.host;
      f.theta = nb[0].lp.theta;
      f.loops = std::move(loops);
      om.facets.push_back(std::move(f));
    }
    b0 = b1;
  }
  return om;
}

void revert_jitter(OutputMesh& out, const std::vector<Mesh>& original_scene, ErrorCounters& errs) {
  for (FinalVertex& fv : out.verts) {
    const Provenance& p = fv.prov;
    if (p.order == 1) {
      fv.pos = original_scene[p.mesh].V[p.vertex];
    } else if (p.order == 2) {
      const Mesh& m = original_scene[p.mesh];
      const Mesh& mc = original_scene[p.crossed.mesh];
      Vec3 pa = m.V[p.va], pb = m.V[p.vb];
      Vec3 e = pb - pa;
      const Vec3& nc = mc.normal[p.crossed.facet];
      double denom = nc.dot(e);
      if (std::abs(denom) < tol::det3_rel * e.norm()) {
        // Edge parallel to the crossed plane: the usual case is an edge lying
        // inside it (plane shared between inputs), where any point of the edge
        // is a valid revert. Keep the jittered parameter along the edge.
        double t = e.dot(fv.pos - pa) / e.squaredNorm();
        Vec3 q = pa + t * e;
        double miss = std::abs(nc.dot(q) - mc.offset[p.crossed.facet]);
        if (miss > tol::det3_rel * (1.0 + q.norm())) errs.singular_intersection += 1;
        fv.pos = q;
        continue;
      }
      double t = (mc.offset[p.crossed.facet] - nc.dot(pa)) / denom;
      fv.pos = pa + t * e;
    } else {
      const Vec3& n1 = original_scene[p.tri[0].mesh].normal[p.tri[0].facet];
      const Vec3& n2 = original_scene[p.tri[1].mesh].normal[p.tri[1].facet];
      const Vec3& n3 = original_scene[p.tri[2].mesh].normal[p.tri[2].facet];
      double d1 = original_scene[p.tri[0].mesh].offset[p.tri[0].facet];
      double d2 = original_scene[p.tri[1].mesh].offset[p.tri[1].facet];
      double d3 = original_scene[p.tri[2].mesh].offset[p.tri[2].facet];
      double det = n1.dot(n2.cross(n3));
      if (std::abs(det) < tol::det3_rel) {
        errs.singular_intersection += 1;
        continue;
      }
      fv.pos = (d1 * n2.cross(n3) + d2 * n3.cross(n1) + d3 * n1.cross(n2)) / det;
    }
  }
}

namespace {

struct P2 {
  double x = 0, y = 0;
};

double shoelace2(const std::vector<P2>& q) {
  double s = 0;
  for (size_t i = 0, n = q.size(); i < n; ++i) {
    const P2& a = q[i];
    const P2& b = q[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return s;
}

bool point_in_loop_2d(const P2& p, const std::vector<P2>& loop) {
  bool in = false;
  for (size_t i = 0, n = loop.size(); i < n; ++i) {
    const P2& a = loop[i];
    const P2& b = loop[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      double xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (xi > p.x) in = !in;
    }
  }
  return in;
}

double cross2(const P2& o, const P2& a, const P2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

struct BridgedPoly {
  std::vector<P2> pt;
  std::vector<int32_t> id;
};

// Joins a hole into the outer loop through two coincident bridge edges.
// Returns false when no visible outer vertex is found.
bool bridge_hole(BridgedPoly& poly, const std::vector<P2>& hole_pt,
                 const std::vector<int32_t>& hole_id, double eps_area) {
  size_t hn = hole_pt.size();
  size_t mi = 0;
  for (size_t i = 1; i < hn; ++i) {
    if (hole_pt[i].x > hole_pt[mi].x ||
        (hole_pt[i].x == hole_pt[mi].x && hole_pt[i].y > hole_pt[mi].y))
      mi = i;
  }
  P2 M = hole_pt[mi];

  size_t pn = poly.pt.size();
  double best_x = std::numeric_limits<double>::infinity();
  size_t best_edge = pn;
  for (size_t i = 0; i < pn; ++i) {
    const P2& a = poly.pt[i];
    const P2& b = poly.pt[(i + 1) % pn];
    if ((a.y > M.y) == (b.y > M.y)) continue;
    double xi = a.x + (M.y - a.y) / (b.y - a.y) * (b.x - a.x);
    if (xi >= M.x && xi < best_x) {
      best_x = xi;
      best_edge = i;
    }
  }
  if (best_edge == pn) return false;

  P2 I{best_x, M.y};
  size_t pa = best_edge, pb = (best_edge + 1) % pn;
  size_t cand = poly.pt[pa].x > poly.pt[pb].x ? pa : pb;

  // a reflex outer vertex inside triangle (M, I, cand) would block the
  // bridge; take the blocker closest in angle to the +x axis instead
  double best_ang = std::numeric_limits<double>::infinity();
  double best_d = std::numeric_limits<double>::infinity();
  size_t blocker = pn;
  for (size_t i = 0; i < pn; ++i) {
    if (i == cand) continue;
    const P2& prev = poly.pt[(i + pn - 1) % pn];
    const P2& next = poly.pt[(i + 1) % pn];
    if (cross2(prev, poly.pt[i], next) >= -eps_area) continue;  // convex corner
    const P2& r = poly.pt[i];
    double c1 = cross2(M, I, r), c2 = cross2(I, poly.pt[cand], r), c3 = cross2(poly.pt[cand], M, r);
    bool inside = poly.pt[cand].y >= M.y ? (c1 > eps_area && c2 > eps_area && c3 > eps_area)
                                         : (c1 < -eps_area && c2 < -eps_area && c3 < -eps_area);
    if (!inside) continue;
    double dx = r.x - M.x, dy = r.y - M.y;
    double d = dx * dx + dy * dy;
    double ang = std::abs(std::atan2(dy, dx));
    if (ang < best_ang || (ang == best_ang && d < best_d)) {
      best_ang = ang;
      best_d = d;
      blocker = i;
    }
  }
  if (blocker < pn) cand = blocker;

  BridgedPoly merged;
  merged.pt.reserve(pn + hn + 2);
  merged.id.reserve(pn + hn + 2);
  for (size_t i = 0; i <= cand; ++i) {
    merged.pt.push_back(poly.pt[i]);
    merged.id.push_back(poly.id[i]);
  }
  for (size_t k = 0; k <= hn; ++k) {
    size_t hi = (mi + k) % hn;
    merged.pt.push_back(hole_pt[hi]);
    merged.id.push_back(hole_id[hi]);
  }
  merged.pt.push_back(poly.pt[cand]);
  merged.id.push_back(poly.id[cand]);
  for (size_t i = cand + 1; i < pn; ++i) {
    merged.pt.push_back(poly.pt[i]);
    merged.id.push_back(poly.id[i]);
  }
  poly = std::move(merged);
  return true;
}

bool ear_clip(const BridgedPoly& poly, double eps_area,
              std::vector<std::array<int32_t, 3>>& tris) {
  int n = static_cast<int>(poly.pt.size());
  if (n < 3) return false;
  std::vector<int> next(n), prev(n);
  for (int i = 0; i < n; ++i) {
    next[i] = (i + 1) % n;
    prev[i] = (i + n - 1) % n;
  }
  auto blocked = [&](int a, int b, int c) {
    const P2& pa = poly.pt[a];
    const P2& pb = poly.pt[b];
    const P2& pc = poly.pt[c];
    for (int w = next[c]; w != a; w = next[w]) {
      const P2& r = poly.pt[w];
      if (cross2(pa, pb, r) > eps_area && cross2(pb, pc, r) > eps_area &&
          cross2(pc, pa, r) > eps_area)
        return true;
    }
    return false;
  };
  int remaining = n;
  int guard = 0;
  int i = 0;
  while (remaining > 3) {
    int a = prev[i], c = next[i];
    double cr = cross2(poly.pt[a], poly.pt[i], poly.pt[c]);
    bool ear = cr > eps_area && !blocked(a, i, c);
    if (!ear && guard >= remaining) {
      // no strictly convex ear left; clip a flat one to finish the polygon
      ear = cr >= -eps_area && !blocked(a, i, c);
    }
    if (ear) {
      tris.push_back({poly.id[a], poly.id[i], poly.id[c]});
      next[a] = c;
      prev[c] = a;
      --remaining;
      i = a;
      guard = 0;
    } else {
      i = c;
      if (++guard > 2 * remaining) return false;
    }
  }
  tris.push_back({poly.id[prev[i]], poly.id[i], poly.id[next[i]]});
  return true;
}

// Greedy convex-merge of a triangle set: removes a shared diagonal whenever
// both merged corners stay convex and no vertex would repeat in the loop.
void merge_convex(std::vector<std::vector<int32_t>>& polys,
                  const std::unordered_map<int32_t, P2>& coord, double eps_area) {
  auto corner_ok = [&](int32_t a, int32_t b, int32_t c) {
    return cross2(coord.at(a), coord.at(b), coord.at(c)) >= -eps_area;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<int32_t, int32_t>, std::pair<size_t, size_t>> edges;
    for (size_t pi = 0; pi < polys.size(); ++pi) {
      const auto& q = polys[pi];
      for (size_t k = 0; k < q.size(); ++k)
        edges[{q[k], q[(k + 1) % q.size()]}] = {pi, k};
    }
    for (auto& [e, where] : edges) {
      auto rit = edges.find({e.second, e.first});
      if (rit == edges.end()) continue;
      auto [pi, ka] = where;
      auto [pj, kb] = rit->second;
      if (pi >= pj) continue;
      const auto& A = polys[pi];
      const auto& B = polys[pj];
      size_t an = A.size(), bn = B.size();
      // merged loop: A from v around to u, then B's interior from u to v
      std::vector<int32_t> m;
      m.reserve(an + bn - 2);
      for (size_t k = 0; k < an; ++k) m.push_back(A[(ka + 1 + k) % an]);  // starts at v, ends at u
      for (size_t k = 1; k + 1 < bn; ++k) m.push_back(B[(kb + 1 + k) % bn]);
      std::vector<int32_t> sorted = m;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
      size_t iu = an - 1;
      if (!corner_ok(m[(iu + m.size() - 1) % m.size()], m[iu], m[(iu + 1) % m.size()])) continue;
      if (!corner_ok(m[m.size() - 1], m[0], m[1])) continue;
      polys[pi] = std::move(m);
      polys.erase(polys.begin() + static_cast<ptrdiff_t>(pj));
      changed = true;
      break;
    }
  }
}

}  // namespace

PolySoup tesselate_output(const OutputMesh& out, const std::vector<Mesh>& scene,
                          TesselateMode mode, ErrorCounters& errs) {
  PolySoup soup;
  soup.V.reserve(out.verts.size());
  for (const FinalVertex& fv : out.verts) soup.V.push_back(fv.pos);
  soup.plane_comments = mode == TesselateMode::None;

  for (size_t fi = 0; fi < out.facets.size(); ++fi) {
    const OutFacet& f = out.facets[fi];
    int32_t plane_id = static_cast<int32_t>(fi);
    auto emit_raw = [&] {
      for (const OutLoop& loop : f.loops) soup.polys.push_back({loop.v, plane_id, f.theta});
    };
    if (mode == TesselateMode::None) {
      emit_raw();
      continue;
    }

    Vec3 n = scene[f.src.mesh].normal[f.src.facet] * static_cast<double>(f.theta);
    Vec3 u = std::abs(n.x()) <= std::abs(n.y()) && std::abs(n.x()) <= std::abs(n.z())
                 ? Vec3(1, 0, 0)
                 : (std::abs(n.y()) <= std::abs(n.z()) ? Vec3(0, 1, 0) : Vec3(0, 0, 1));
    Vec3 e1 = n.cross(u).normalized();
    Vec3 e2 = n.cross(e1);

    std::vector<std::vector<P2>> pts(f.loops.size());
    std::vector<double> area(f.loops.size());
    double diam2 = 0;
    for (size_t li = 0; li < f.loops.size(); ++li) {
      for (int32_t v : f.loops[li].v) {
        const Vec3& p = soup.V[v];
        pts[li].push_back({p.dot(e1), p.dot(e2)});
      }
      for (const P2& a : pts[li])
        for (const P2& b : pts[li]) {
          double dx = a.x - b.x, dy = a.y - b.y;
          diam2 = std::max(diam2, dx * dx + dy * dy);
        }
      area[li] = shoelace2(pts[li]);
    }
    double eps_area = 1e-12 * diam2;

    // assign holes to the smallest enclosing outer loop
    std::vector<size_t> outers;
    for (size_t li = 0; li < f.loops.size(); ++li)
      if (area[li] >= 0) outers.push_back(li);
    std::sort(outers.begin(), outers.end(),
              [&](size_t a, size_t b) { return area[a] < area[b]; });
    std::vector<std::vector<size_t>> holes_of(f.loops.size());
    bool ok = !outers.empty();
    for (size_t li = 0; li < f.loops.size() && ok; ++li) {
      if (area[li] >= 0) continue;
      bool placed = false;
      for (size_t oi : outers) {
        if (point_in_loop_2d(pts[li][0], pts[oi])) {
          holes_of[oi].push_back(li);
          placed = true;
          break;
        }
      }
      ok = placed;
    }

    std::vector<std::array<int32_t, 3>> tris;
    for (size_t oi : outers) {
      if (!ok) break;
      BridgedPoly poly;
      poly.pt = pts[oi];
      poly.id = f.loops[oi].v;
      // bridge holes right-to-left so earlier bridges cannot hide later ones
      std::sort(holes_of[oi].begin(), holes_of[oi].end(), [&](size_t a, size_t b) {
        auto maxx = [&](size_t li) {
          double m = -std::numeric_limits<double>::infinity();
          for (const P2& p : pts[li]) m = std::max(m, p.x);
          return m;
        };
        return maxx(a) > maxx(b);
      });
      for (size_t hi : holes_of[oi])
        if (!(ok = bridge_hole(poly, pts[hi], f.loops[hi].v, eps_area))) break;
      if (ok) ok = ear_clip(poly, eps_area, tris);
    }

    if (!ok) {
      errs.tesselation_failure += 1;
      emit_raw();
      continue;
    }

    if (mode == TesselateMode::Tri) {
      for (const auto& t : tris) soup.polys.push_back({{t[0], t[1], t[2]}, plane_id, f.theta});
    } else {
      std::unordered_map<int32_t, P2> coord;
      for (size_t li = 0; li < f.loops.size(); ++li)
        for (size_t k = 0; k < pts[li].size(); ++k) coord[f.loops[li].v[k]] = pts[li][k];
      std::vector<std::vector<int32_t>> polys;
      polys.reserve(tris.size());
      for (const auto& t : tris) polys.push_back({t[0], t[1], t[2]});
      merge_convex(polys, coord, eps_area);
      for (auto& q : polys) soup.polys.push_back({std::move(q), plane_id, f.theta});
    }
  }
  return soup;
}

std::optional<TesselateMode> parse_tesselate_mode(const std::string& s) {
  if (s == "none") return TesselateMode::None;
  if (s == "convex") return TesselateMode::Convex;
  if (s == "tri") return TesselateMode::Tri;
  return std::nullopt;
}

}  // namespace ncsg
