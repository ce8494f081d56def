#pragma once

#include "narycsg/boolfn.h"
#include "narycsg/mesh.h"
#include "narycsg/types.h"

#include <array>
#include <functional>
#include <optional>
#include <span>

namespace ncsg {

// Where a final vertex comes from. The key() is the canonical identity used
// for dedup, sorting and cross-engine comparison:
//   order 1: an input vertex;
//   order 2: a mesh edge (canonical va < vb) crossing a facet of another
//            mesh; facet_left contains the directed edge (va -> vb),
//            facet_right contains (vb -> va);
//   order 3: three facets of three distinct meshes, sorted by (mesh, facet).
struct Provenance {
  uint8_t order = 0;
  int32_t mesh = -1;
  int32_t vertex = -1;              // order 1
  int32_t va = -1, vb = -1;         // order 2 edge, va < vb
  int32_t facet_left = -1, facet_right = -1;
  FacetRef crossed;                 // order 2
  std::array<FacetRef, 3> tri{};    // order 3, ascending

  static Provenance order1(int32_t mesh, int32_t vertex);
  static Provenance order2(const Mesh& m, int32_t mesh_idx, int32_t facet, int32_t corner,
                           FacetRef crossed);
  static Provenance order3(FacetRef a, FacetRef b, FacetRef c);  // any order; sorts

  std::array<int32_t, 8> key() const;
  // Classification flip slots (input indices), most significant first.
  // order 2 lists the edge-owner mesh before the crossed mesh.
  std::array<int, 3> flip_slots() const;  // only the first `order` entries valid

  friend bool operator==(const Provenance& x, const Provenance& y) { return x.key() == y.key(); }
  friend bool operator<(const Provenance& x, const Provenance& y) { return x.key() < y.key(); }
};

struct ProvenanceHash {
  size_t operator()(const Provenance& p) const {
    auto k = p.key();
    size_t h = 0xcbf29ce484222325ull;
    for (int32_t v : k) {
      h ^= uint32_t(v);
      h *= 0x100000001b3ull;
    }
    return h;
  }
};

struct FinalVertex {
  Vec3 pos;
  Provenance prov;
  uint8_t cls = 0;   // 2^order flip-probe bits, first flip slot most significant
  IndicatorVec ind;  // full point indicator, Surf exactly at provenance slots
};

// Classification predicates over flip-probe bytes. Bit a of the byte is
// f(assignment a) with the first flip slot as the most significant bit of a.
bool isFinal1(uint8_t probe);
bool isFinal2(uint8_t probe);
bool isFinal3(uint8_t probe);

// Resolves one non-surface slot at a point (In/Out); nullopt = undecided.
using SlotResolver = std::function<std::optional<Slot>(int slot, const Vec3& x)>;

// Builds the full indicator of a point: Surf at the given slots, everything
// else through the resolver. nullopt when any slot stays undecided.
std::optional<IndicatorVec> point_indicator(const Vec3& x, int n, std::span<const int> s_slots,
                                            const SlotResolver& resolve);

// Indicator + flip probe + isFinal check in one step; nullopt when the
// candidate is rejected or its indicator could not be resolved.
std::optional<FinalVertex> classify_candidate(const Vec3& x, const Provenance& prov,
                                              const BoolFn& fn, const SlotResolver& resolve);

}  // namespace ncsg
