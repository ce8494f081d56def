#include "narycsg/mesh.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

namespace ncsg {

namespace {

// Newell normal: robust for near-planar loops, zero for degenerate ones.
Vec3 newell_normal(const std::vector<Vec3>& V, const std::vector<int32_t>& loop) {
  Vec3 n = Vec3::Zero();
  for (size_t k = 0; k < loop.size(); ++k) {
    const Vec3& a = V[loop[k]];
    const Vec3& b = V[loop[(k + 1) % loop.size()]];
    n.x() += (a.y() - b.y()) * (a.z() + b.z());
    n.y() += (a.z() - b.z()) * (a.x() + b.x());
    n.z() += (a.x() - b.x()) * (a.y() + b.y());
  }
  return n;
}

double loop_diameter(const std::vector<Vec3>& V, const std::vector<int32_t>& loop) {
  Box3 b;
  for (int32_t v : loop) b.expand(V[v]);
  return b.diagonal();
}

uint64_t dir_edge_key(int32_t a, int32_t b) {
  return (uint64_t(uint32_t(a)) << 32) | uint32_t(b);
}

}  // namespace

std::vector<TopologyError> topology_pass(Mesh& m) {
  std::vector<TopologyError> errs;
  auto fail = [&](TopologyError::Kind k, int32_t f, std::string d) {
    errs.push_back({k, f, std::move(d)});
  };

  m.normal.assign(m.F.size(), Vec3::Zero());
  m.offset.assign(m.F.size(), 0.0);
  m.diameter.assign(m.F.size(), 0.0);
  m.opp.assign(m.F.size(), {});
  m.incident.assign(m.V.size(), {});

  if (m.F.empty()) {
    fail(TopologyError::Kind::DegenerateFacet, -1, "mesh has no facets");
    return errs;
  }

  // Per-facet geometric checks.
  for (size_t f = 0; f < m.F.size(); ++f) {
    const auto& loop = m.F[f];
    if (loop.size() < 3) {
      fail(TopologyError::Kind::DegenerateFacet, int32_t(f), "loop has fewer than 3 vertices");
      continue;
    }
    bool bad_index = false;
    for (int32_t v : loop) {
      if (v < 0 || size_t(v) >= m.V.size()) {
        fail(TopologyError::Kind::DegenerateFacet, int32_t(f), "vertex index out of range");
        bad_index = true;
        break;
      }
    }
    if (bad_index) continue;
    for (size_t k = 0; k < loop.size(); ++k) {
      if (loop[k] == loop[(k + 1) % loop.size()]) {
        fail(TopologyError::Kind::DegenerateFacet, int32_t(f), "repeated consecutive vertex");
        bad_index = true;
        break;
      }
    }
    if (bad_index) continue;

    double diam = loop_diameter(m.V, loop);
    Vec3 n = newell_normal(m.V, loop);
    double area2 = n.norm();  // twice the area for planar loops
    if (!(diam > 0.0) || area2 <= tol::planarity_rel * diam * diam) {
      fail(TopologyError::Kind::DegenerateFacet, int32_t(f), "zero-area loop");
      continue;
    }
    n /= area2;

    Vec3 c = Vec3::Zero();
    for (int32_t v : loop) c += m.V[v];
    c /= double(loop.size());

    double planar_tol = tol::planarity_rel * diam;
    for (int32_t v : loop) {
      if (std::abs(n.dot(m.V[v] - c)) > planar_tol) {
        fail(TopologyError::Kind::DegenerateFacet, int32_t(f), "non-planar loop");
        break;
      }
    }

    // Convexity: every corner turns left (or is straight within tolerance)
    // when walking the CCW loop. Cross products scale like diam^2.
    double convex_tol = tol::planarity_rel * diam * diam;
    for (size_t k = 0; k < loop.size(); ++k) {
      const Vec3& p0 = m.V[loop[k]];
      const Vec3& p1 = m.V[loop[(k + 1) % loop.size()]];
      const Vec3& p2 = m.V[loop[(k + 2) % loop.size()]];
      if ((p1 - p0).cross(p2 - p1).dot(n) < -convex_tol) {
        fail(TopologyError::Kind::DegenerateFacet, int32_t(f), "non-convex loop");
        break;
      }
    }

    m.normal[f] = n;
    m.offset[f] = n.dot(c);
    m.diameter[f] = diam;
  }
  if (!errs.empty()) return errs;

  // Adjacency: each directed edge must appear exactly once, and its reversal
  // exactly once in some other (or the same) facet.
  std::unordered_map<uint64_t, std::pair<int32_t, int32_t>> half;  // (facet, corner)
  half.reserve(m.F.size() * 4);
  for (size_t f = 0; f < m.F.size(); ++f) {
    const auto& loop = m.F[f];
    for (size_t k = 0; k < loop.size(); ++k) {
      int32_t a = loop[k], b = loop[(k + 1) % loop.size()];
      auto [it, fresh] = half.emplace(dir_edge_key(a, b), std::make_pair(int32_t(f), int32_t(k)));
      if (!fresh) {
        fail(TopologyError::Kind::NonManifold, int32_t(f),
             "directed edge " + std::to_string(a) + "->" + std::to_string(b) +
                 " appears more than once");
      }
    }
  }
  if (!errs.empty()) return errs;

  for (size_t f = 0; f < m.F.size(); ++f) {
    const auto& loop = m.F[f];
    m.opp[f].assign(loop.size(), -1);
    for (size_t k = 0; k < loop.size(); ++k) {
      int32_t a = loop[k], b = loop[(k + 1) % loop.size()];
      auto it = half.find(dir_edge_key(b, a));
      if (it == half.end()) {
        fail(TopologyError::Kind::OpenSurface, int32_t(f),
             "edge " + std::to_string(a) + "->" + std::to_string(b) + " has no opposite");
      } else {
        m.opp[f][k] = it->second.first;
      }
      m.incident[a].push_back({int32_t(f), int32_t(k)});
    }
  }
  return errs;
}

std::vector<std::string> validate(const Mesh& m) {
  std::vector<std::string> out;
  Mesh copy = m;
  for (const auto& e : topology_pass(copy)) {
    const char* kind = e.kind == TopologyError::Kind::NonManifold    ? "non-manifold"
                       : e.kind == TopologyError::Kind::OpenSurface ? "open surface"
                                                                    : "degenerate facet";
    out.push_back(std::string(kind) + " (facet " + std::to_string(e.facet) + "): " + e.detail);
  }
  if (m.has_topology()) {
    for (size_t f = 0; f < m.F.size(); ++f) {
      if (std::abs(m.normal[f].norm() - 1.0) > tol::unit_norm)
        out.push_back("facet " + std::to_string(f) + ": non-unit normal");
    }
  }
  std::map<std::array<uint64_t, 3>, int32_t> seen;  // keyed on exact bit patterns
  for (size_t v = 0; v < m.V.size(); ++v) {
    std::array<uint64_t, 3> key;
    std::memcpy(key.data(), m.V[v].data(), 24);
    auto [it, fresh] = seen.emplace(key, int32_t(v));
    if (!fresh)
      out.push_back("vertices " + std::to_string(it->second) + " and " + std::to_string(v) +
                    " have identical coordinates");
  }
  return out;
}

double signed_volume(const Mesh& m) {
  double six_vol = 0.0;
  for (const auto& loop : m.F) {
    const Vec3& p0 = m.V[loop[0]];
    for (size_t k = 1; k + 1 < loop.size(); ++k)
      six_vol += p0.dot(m.V[loop[k]].cross(m.V[loop[k + 1]]));
  }
  return six_vol / 6.0;
}

Box3 mesh_bbox(const Mesh& m) {
  Box3 b;
  for (const Vec3& p : m.V) b.expand(p);
  return b;
}

SceneTransform apply_jitter(std::vector<Mesh>& meshes, JitterMode mode, uint64_t seed,
                            double translate_rel) {
  SceneTransform tf;
  tf.mode = mode;
  tf.t.assign(meshes.size(), Vec3::Zero());
  if (mode == JitterMode::None || meshes.empty()) return tf;

  std::mt19937_64 rng(seed);
  auto u01 = [&] { return unit_double(rng()); };

  if (mode == JitterMode::Rotate || mode == JitterMode::Both) {
    // Shoemake's uniform random quaternion.
    double u1 = u01(), u2 = u01(), u3 = u01();
    double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    double qx = a * std::sin(2 * M_PI * u2), qy = a * std::cos(2 * M_PI * u2);
    double qz = b * std::sin(2 * M_PI * u3), qw = b * std::cos(2 * M_PI * u3);
    tf.R = Eigen::Quaterniond(qw, qx, qy, qz).toRotationMatrix();
  }

  Box3 scene;
  for (const Mesh& m : meshes) scene.expand(mesh_bbox(m));
  double mag = translate_rel * scene.diagonal();

  if (mode == JitterMode::Translate || mode == JitterMode::Both) {
    for (Vec3& t : tf.t)
      t = mag * Vec3(2 * u01() - 1, 2 * u01() - 1, 2 * u01() - 1);
  }

  for (size_t i = 0; i < meshes.size(); ++i) {
    Mesh& m = meshes[i];
    for (Vec3& p : m.V) p = tf.apply(p, i);
    // Planes must follow the moved coordinates.
    for (size_t f = 0; f < m.F.size(); ++f) {
      Vec3 n = newell_normal(m.V, m.F[f]);
      double len = n.norm();
      if (len > 0) n /= len;
      Vec3 c = Vec3::Zero();
      for (int32_t v : m.F[f]) c += m.V[v];
      c /= double(m.F[f].size());
      m.normal[f] = n;
      m.offset[f] = n.dot(c);
      m.diameter[f] = loop_diameter(m.V, m.F[f]);
    }
  }
  return tf;
}

std::optional<JitterMode> parse_jitter_mode(const std::string& s) {
  if (s == "none") return JitterMode::None;
  if (s == "translate") return JitterMode::Translate;
  if (s == "rotate") return JitterMode::Rotate;
  if (s == "both") return JitterMode::Both;
  return std::nullopt;
}

}  // namespace ncsg
