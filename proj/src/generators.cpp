#include "narycsg/generators.h"

#include <cassert>
#include <cmath>
#include <map>
#include <random>

namespace ncsg {

namespace {

Mesh finish(Mesh m) {
  auto errs = topology_pass(m);
  assert(errs.empty());
  (void)errs;
  return m;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}
  double u01() { return unit_double(gen()); }
  double in(double lo, double hi) { return lo + (hi - lo) * u01(); }
  Vec3 unit_vec() {
    double z = in(-1, 1), phi = in(0, 2 * M_PI);
    double r = std::sqrt(std::max(0.0, 1 - z * z));
    return Vec3(r * std::cos(phi), r * std::sin(phi), z);
  }
};

}  // namespace

Mesh make_box(const Vec3& lo, const Vec3& hi) {
  Mesh m;
  m.V = {{lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()}, {hi.x(), hi.y(), lo.z()},
         {lo.x(), hi.y(), lo.z()}, {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
         {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()}};
  m.F = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  return finish(std::move(m));
}

Mesh make_tetra(const Vec3& c, double s) {
  Mesh m;
  m.V = {c + s * Vec3(1, 1, 1), c + s * Vec3(1, -1, -1), c + s * Vec3(-1, 1, -1),
         c + s * Vec3(-1, -1, 1)};
  m.F = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
  return finish(std::move(m));
}

Mesh make_icosphere(const Vec3& c, double radius, int subdiv) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> V = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : V) p.normalize();
  std::vector<std::array<int32_t, 3>> F = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},   {9, 8, 1}};

  for (int step = 0; step < subdiv; ++step) {
    std::map<std::pair<int32_t, int32_t>, int32_t> midpoint;
    auto mid = [&](int32_t a, int32_t b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 p = (V[a] + V[b]).normalized();
      V.push_back(p);
      int32_t idx = int32_t(V.size() - 1);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int32_t, 3>> next;
    next.reserve(F.size() * 4);
    for (auto [a, b, cc] : F) {
      int32_t ab = mid(a, b), bc = mid(b, cc), ca = mid(cc, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({cc, ca, bc});
      next.push_back({ab, bc, ca});
    }
    F = std::move(next);
  }

  Mesh m;
  m.V.reserve(V.size());
  for (const Vec3& p : V) m.V.push_back(c + radius * p);
  m.F.reserve(F.size());
  for (auto [a, b, cc] : F) m.F.push_back({a, b, cc});
  return finish(std::move(m));
}

Mesh make_torus(const Vec3& c, const Vec3& axis, double R, double r, int nu, int nv) {
  assert(nu >= 3 && nv >= 3 && r < R);
  Vec3 e3 = axis.normalized();
  Vec3 e1 = e3.cross(std::abs(e3.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0)).normalized();
  Vec3 e2 = e3.cross(e1);

  Mesh m;
  m.V.reserve(size_t(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    double u = 2 * M_PI * i / nu;
    Vec3 ring = std::cos(u) * e1 + std::sin(u) * e2;
    for (int j = 0; j < nv; ++j) {
      double v = 2 * M_PI * j / nv;
      m.V.push_back(c + (R + r * std::cos(v)) * ring + r * std::sin(v) * e3);
    }
  }
  auto id = [&](int i, int j) { return int32_t((i % nu) * nv + (j % nv)); };
  m.F.reserve(size_t(nu) * nv * 2);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      // grid quad (i,j)-(i+1,j)-(i+1,j+1)-(i,j+1) is CCW from outside;
      // split along one diagonal since torus quads are not planar
      m.F.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.F.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return finish(std::move(m));
}

namespace {

// 2*nu*nv ~ facets with a roughly 2:1 major/minor resolution split.
std::pair<int, int> torus_grid(int facets) {
  int nu = std::max(6, int(std::lround(std::sqrt(facets))));
  int nv = std::max(3, int(std::lround(facets / (2.0 * nu))));
  return {nu, nv};
}

}  // namespace

std::vector<Mesh> t1_scene(int n_tori, int facets_per_torus, uint64_t seed) {
  Rng rng(seed);
  auto [nu, nv] = torus_grid(facets_per_torus);
  std::vector<Mesh> scene;
  scene.reserve(n_tori);
  for (int i = 0; i < n_tori; ++i) {
    Vec3 c(rng.in(0.25, 0.75), rng.in(0.25, 0.75), rng.in(0.25, 0.75));
    double R = rng.in(0.18, 0.38);
    double r = R * rng.in(0.28, 0.5);
    scene.push_back(make_torus(c, rng.unit_vec(), R, r, nu, nv));
  }
  return scene;
}

std::vector<Mesh> t2_scene(int n_tori, int facets_per_torus, uint64_t seed, double sphere_r) {
  Rng rng(seed);
  auto [nu, nv] = torus_grid(facets_per_torus);
  std::vector<Mesh> scene;
  scene.reserve(n_tori);
  for (int i = 0; i < n_tori; ++i) {
    double r = sphere_r * rng.in(0.035, 0.06);
    scene.push_back(make_torus(Vec3::Zero(), rng.unit_vec(), sphere_r, r, nu, nv));
  }
  return scene;
}

std::vector<Mesh> random_mix_scene(int n_meshes, int max_facets_each, uint64_t seed) {
  Rng rng(seed);
  std::vector<Mesh> scene;
  scene.reserve(n_meshes);
  for (int i = 0; i < n_meshes; ++i) {
    Vec3 c(rng.in(-0.4, 0.4), rng.in(-0.4, 0.4), rng.in(-0.4, 0.4));
    double s = rng.in(0.35, 0.8);
    int kind = int(rng.in(0, 3));
    if (kind == 0) {
      Vec3 half(s * rng.in(0.5, 1.0), s * rng.in(0.5, 1.0), s * rng.in(0.5, 1.0));
      scene.push_back(make_box(c - half, c + half));
    } else if (kind == 1) {
      int subdiv = max_facets_each >= 320 ? 2 : (max_facets_each >= 80 ? 1 : 0);
      scene.push_back(make_icosphere(c, s, subdiv));
    } else {
      int facets = std::min(max_facets_each, 128);
      auto [nu, nv] = torus_grid(facets);
      scene.push_back(make_torus(c, rng.unit_vec(), s, s * rng.in(0.3, 0.45), nu, nv));
    }
  }
  return scene;
}

}  // namespace ncsg
