#include "narycsg/classify.h"

#include <algorithm>
#include <cassert>

namespace ncsg {

Provenance Provenance::order1(int32_t mesh, int32_t vertex) {
  Provenance p;
  p.order = 1;
  p.mesh = mesh;
  p.vertex = vertex;
  return p;
}

Provenance Provenance::order2(const Mesh& m, int32_t mesh_idx, int32_t facet, int32_t corner,
                              FacetRef crossed) {
  Provenance p;
  p.order = 2;
  p.mesh = mesh_idx;
  const auto& loop = m.F[facet];
  int32_t a = loop[corner];
  int32_t b = loop[(corner + 1) % loop.size()];
  int32_t other = m.opp[facet][corner];
  if (a < b) {
    p.va = a;
    p.vb = b;
    p.facet_left = facet;   // contains directed (va -> vb)
    p.facet_right = other;
  } else {
    p.va = b;
    p.vb = a;
    p.facet_left = other;
    p.facet_right = facet;
  }
  p.crossed = crossed;
  return p;
}

Provenance Provenance::order3(FacetRef a, FacetRef b, FacetRef c) {
  Provenance p;
  p.order = 3;
  p.tri = {a, b, c};
  std::sort(p.tri.begin(), p.tri.end());
  return p;
}

std::array<int32_t, 8> Provenance::key() const {
  switch (order) {
    case 1:
      return {1, mesh, vertex, 0, 0, 0, 0, 0};
    case 2:
      return {2, mesh, va, vb, crossed.mesh, crossed.facet, 0, 0};
    case 3:
      return {3, tri[0].mesh, tri[0].facet, tri[1].mesh, tri[1].facet, tri[2].mesh,
              tri[2].facet, 0};
    default:
      return {0, 0, 0, 0, 0, 0, 0, 0};
  }
}

std::array<int, 3> Provenance::flip_slots() const {
  switch (order) {
    case 1:
      return {mesh, -1, -1};
    case 2:
      return {mesh, crossed.mesh, -1};  // edge owner first (most significant)
    case 3:
      return {tri[0].mesh, tri[1].mesh, tri[2].mesh};
    default:
      return {-1, -1, -1};
  }
}

bool isFinal1(uint8_t p) { return ((p >> 0) & 1) != ((p >> 1) & 1); }

bool isFinal2(uint8_t p) {
  // bit a = f(b_i b_j) with a = (b_i << 1) | b_j
  uint8_t i0 = p & 3;                                   // (b00, b01): f over j with i=0
  uint8_t i1 = (p >> 2) & 3;                            // (b10, b11)
  uint8_t j0 = ((p >> 0) & 1) | (((p >> 2) & 1) << 1);  // (b00, b10): i varies, j=0
  uint8_t j1 = ((p >> 1) & 1) | (((p >> 3) & 1) << 1);  // (b01, b11)
  bool kept = (i0 != i1) && (j0 != j1);
  // Rejection always means the vertex is interior/exterior or sits mid-facet:
  // some axis slice pair is equal.
  assert(kept || i0 == i1 || j0 == j1);
  return kept;
}

bool isFinal3(uint8_t p) {
  // bit a = f(b_i b_j b_k), a = (b_i << 2) | (b_j << 1) | b_k
  auto slice = [&](int axis, int value) {
    uint8_t out = 0;
    int pos = 0;
    for (int a = 0; a < 8; ++a) {
      int bit_of_axis = (a >> (2 - axis)) & 1;
      if (bit_of_axis != value) continue;
      out |= uint8_t(((p >> a) & 1) << pos);
      ++pos;
    }
    return out;
  };
  bool kept = slice(0, 0) != slice(0, 1) && slice(1, 0) != slice(1, 1) &&
              slice(2, 0) != slice(2, 1);
  assert(kept || slice(0, 0) == slice(0, 1) || slice(1, 0) == slice(1, 1) ||
         slice(2, 0) == slice(2, 1));
  return kept;
}

std::optional<IndicatorVec> point_indicator(const Vec3& x, int n, std::span<const int> s_slots,
                                            const SlotResolver& resolve) {
  IndicatorVec iv = IndicatorVec::all_out(n);
  for (int slot = 0; slot < n; ++slot) {
    bool is_surf = std::find(s_slots.begin(), s_slots.end(), slot) != s_slots.end();
    if (is_surf) {
      iv.set(slot, Slot::Surf);
      continue;
    }
    auto r = resolve(slot, x);
    if (!r) return std::nullopt;
    iv.set(slot, *r);
  }
  return iv;
}

std::optional<FinalVertex> classify_candidate(const Vec3& x, const Provenance& prov,
                                              const BoolFn& fn, const SlotResolver& resolve) {
  auto slots = prov.flip_slots();
  std::span<const int> flip(slots.data(), prov.order);
  auto iv = point_indicator(x, fn.arity(), flip, resolve);
  if (!iv) return std::nullopt;
  uint8_t cls = fn.flip_probe(*iv, flip);
  bool kept = prov.order == 1 ? isFinal1(cls) : prov.order == 2 ? isFinal2(cls) : isFinal3(cls);
  if (!kept) return std::nullopt;
  return FinalVertex{x, prov, cls, *iv};
}

}  // namespace ncsg
