#pragma once

#include "narycsg/types.h"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ncsg {

// Per-input indicator state. Cells use {Out, In, Undef}; point queries may
// also report Surf (exactly on the input's boundary).
enum class Slot : uint8_t { Out = 0, In = 1, Undef = 2, Surf = 3 };

enum class Trit : uint8_t { Zero = 0, One = 1, Undef = 2 };

// Indicator vector for up to 256 inputs, two bits of state per slot packed in
// machine words. The unpacked working form keeps three parallel bit planes
// (value / undef / surf) which makes flips and probes branch-free.
struct IndicatorVec {
  static constexpr int kMaxN = 256;
  int n = 0;
  std::array<uint64_t, 4> val{};
  std::array<uint64_t, 4> undef{};
  std::array<uint64_t, 4> surf{};

  static IndicatorVec all_undef(int n_) {
    IndicatorVec iv;
    iv.n = n_;
    for (int i = 0; i < n_; ++i) iv.undef[i >> 6] |= 1ull << (i & 63);
    return iv;
  }
  static IndicatorVec all_out(int n_) {
    IndicatorVec iv;
    iv.n = n_;
    return iv;
  }

  Slot get(int i) const {
    uint64_t bit = 1ull << (i & 63);
    if (surf[i >> 6] & bit) return Slot::Surf;
    if (undef[i >> 6] & bit) return Slot::Undef;
    return (val[i >> 6] & bit) ? Slot::In : Slot::Out;
  }
  void set(int i, Slot s) {
    uint64_t bit = 1ull << (i & 63);
    val[i >> 6] &= ~bit;
    undef[i >> 6] &= ~bit;
    surf[i >> 6] &= ~bit;
    switch (s) {
      case Slot::In: val[i >> 6] |= bit; break;
      case Slot::Undef: undef[i >> 6] |= bit; break;
      case Slot::Surf: surf[i >> 6] |= bit; break;
      case Slot::Out: break;
    }
  }
  int count_undef() const {
    int c = 0;
    for (uint64_t w : undef) c += int(__builtin_popcountll(w));
    return c;
  }
  int first_undef() const {
    for (int w = 0; w < 4; ++w)
      if (undef[w]) return w * 64 + __builtin_ctzll(undef[w]);
    return -1;
  }
  bool all_defined() const {
    for (int w = 0; w < 4; ++w)
      if (undef[w] | surf[w]) return false;
    return true;
  }

  // Canonical 2-bit-per-slot packing: slot i occupies bits (2i, 2i+1) with
  // 00=Out, 01=In, 10=Undef, 11=Surf.
  std::array<uint64_t, 8> pack() const;
  static IndicatorVec from_packed(int n, const std::array<uint64_t, 8>& w);

  friend bool operator==(const IndicatorVec&, const IndicatorVec&) = default;
};

// Expression DAG over input indices. Diff is kept as its own node so trees
// parsed from "A - B" print back the same way; evaluation treats it as
// A AND NOT B. MinK is variadic: true when at least k children are true.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { Var, Not, And, Or, Xor, Diff, MinK };
  Op op = Op::Var;
  int var = -1;
  int k = 0;
  std::vector<ExprPtr> kids;

  static ExprPtr make_var(int i);
  static ExprPtr make(Op op, std::vector<ExprPtr> kids, int k = 0);
};

// N-ary boolean function. Evaluation has two routes: the expression tree, and
// for arity <= 16 a compiled lookup table over all 2^N assignments; both must
// agree everywhere. Ternary evaluation extends the operators to {0,1,u}:
// a result of u means "could be either depending on the undefined slots"
// (possibly conservatively so for expressions that repeat an input).
class BoolFn {
 public:
  BoolFn() = default;
  static BoolFn from_expr(ExprPtr root, int min_arity = 0);
  static BoolFn from_table(int n, std::vector<uint8_t> bits);  // bit a = f(a)

  int arity() const { return n_; }
  bool has_table() const { return !table_.empty(); }
  const ExprPtr& root() const { return root_; }

  // All slots must be defined (no Undef, no Surf).
  bool eval_binary(const IndicatorVec& iv) const;
  // Assignment packed in the low n bits, slot i = bit i. Valid for n <= 32.
  bool eval_bits(uint32_t assignment) const;
  Trit eval_ternary(const IndicatorVec& iv) const;

  // Evaluates f on the 2^k completions of `base` obtained by substituting all
  // combinations of 0/1 into the listed slots (which may be Surf in base; all
  // other slots must be defined). Bit a of the result is f(completion a) where
  // the FIRST listed slot is the most significant bit of a.
  uint8_t flip_probe(const IndicatorVec& base, std::span<const int> flip) const;

 private:
  int n_ = 0;
  ExprPtr root_;
  std::vector<uint8_t> table_;  // 2^n entries when n_ <= 16
};

// Binary CSG tree node set: {Or, And, Diff, Xor} internal nodes, Var leaves.
bool is_binary_csg_tree(const ExprPtr& e);

// min-2 of n inputs as a pure binary tree: union over all pairwise
// intersections, left-associated.
ExprPtr expand_min2_binary(int n);

BoolFn from_csg_tree(const ExprPtr& tree);

struct ParseError {
  size_t pos;
  std::string message;
};

// Grammar (whitespace-insensitive):
//   or    := xor  (('|' | '-') xor)*      lowest precedence, left-assoc
//   xor   := and  ('^' and)*
//   and   := atom ('&' atom)*
//   atom  := 'P' INT | call | '(' or ')'
//   call  := ('union' | 'inter' | 'min' INT) '(' arg (',' arg)* ')'
//   arg   := or | 'P' INT '..' 'P' INT    range expands to consecutive inputs
std::optional<ExprPtr> parse_expr(const std::string& text, ParseError* err = nullptr);

// Largest input index referenced, or -1 for none.
int max_var(const ExprPtr& e);

std::string to_string(const ExprPtr& e);

}  // namespace ncsg
