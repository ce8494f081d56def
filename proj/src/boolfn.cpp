#include "narycsg/boolfn.h"

#include <cassert>
#include <cctype>
#include <stdexcept>

namespace ncsg {

std::array<uint64_t, 8> IndicatorVec::pack() const {
  std::array<uint64_t, 8> w{};
  for (int i = 0; i < n; ++i) {
    uint64_t code = uint64_t(uint8_t(get(i)));
    w[i >> 5] |= code << (2 * (i & 31));
  }
  return w;
}

IndicatorVec IndicatorVec::from_packed(int n, const std::array<uint64_t, 8>& w) {
  IndicatorVec iv;
  iv.n = n;
  for (int i = 0; i < n; ++i)
    iv.set(i, Slot((w[i >> 5] >> (2 * (i & 31))) & 3));
  return iv;
}

ExprPtr Expr::make_var(int i) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Var;
  e->var = i;
  return e;
}

ExprPtr Expr::make(Op op, std::vector<ExprPtr> kids, int k) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->kids = std::move(kids);
  e->k = k;
  return e;
}

int max_var(const ExprPtr& e) {
  if (!e) return -1;
  if (e->op == Expr::Op::Var) return e->var;
  int m = -1;
  for (const auto& kid : e->kids) m = std::max(m, max_var(kid));
  return m;
}

bool is_binary_csg_tree(const ExprPtr& e) {
  if (!e) return false;
  if (e->op == Expr::Op::Var) return e->var >= 0;
  switch (e->op) {
    case Expr::Op::And:
    case Expr::Op::Or:
    case Expr::Op::Xor:
    case Expr::Op::Diff:
      return e->kids.size() == 2 && is_binary_csg_tree(e->kids[0]) &&
             is_binary_csg_tree(e->kids[1]);
    default:
      return false;
  }
}

namespace {

template <class Get>
bool eval_node(const Expr* e, const Get& get) {
  using Op = Expr::Op;
  switch (e->op) {
    case Op::Var:
      return get(e->var);
    case Op::Not:
      return !eval_node(e->kids[0].get(), get);
    case Op::And:
      for (const auto& kid : e->kids)
        if (!eval_node(kid.get(), get)) return false;
      return true;
    case Op::Or:
      for (const auto& kid : e->kids)
        if (eval_node(kid.get(), get)) return true;
      return false;
    case Op::Xor: {
      bool acc = false;
      for (const auto& kid : e->kids) acc ^= eval_node(kid.get(), get);
      return acc;
    }
    case Op::Diff:
      return eval_node(e->kids[0].get(), get) && !eval_node(e->kids[1].get(), get);
    case Op::MinK: {
      int count = 0;
      for (const auto& kid : e->kids)
        if (eval_node(kid.get(), get)) ++count;
      return count >= e->k;
    }
  }
  return false;
}

Trit trit_not(Trit a) {
  if (a == Trit::Undef) return Trit::Undef;
  return a == Trit::One ? Trit::Zero : Trit::One;
}

Trit eval_node_ternary(const Expr* e, const IndicatorVec& iv) {
  using Op = Expr::Op;
  switch (e->op) {
    case Op::Var: {
      Slot s = iv.get(e->var);
      if (s == Slot::In) return Trit::One;
      if (s == Slot::Out) return Trit::Zero;
      return Trit::Undef;  // Surf has no cell meaning; treated as unknown
    }
    case Op::Not:
      return trit_not(eval_node_ternary(e->kids[0].get(), iv));
    case Op::And: {
      bool any_u = false;
      for (const auto& kid : e->kids) {
        Trit t = eval_node_ternary(kid.get(), iv);
        if (t == Trit::Zero) return Trit::Zero;
        any_u |= (t == Trit::Undef);
      }
      return any_u ? Trit::Undef : Trit::One;
    }
    case Op::Or: {
      bool any_u = false;
      for (const auto& kid : e->kids) {
        Trit t = eval_node_ternary(kid.get(), iv);
        if (t == Trit::One) return Trit::One;
        any_u |= (t == Trit::Undef);
      }
      return any_u ? Trit::Undef : Trit::Zero;
    }
    case Op::Xor: {
      bool acc = false;
      for (const auto& kid : e->kids) {
        Trit t = eval_node_ternary(kid.get(), iv);
        if (t == Trit::Undef) return Trit::Undef;
        acc ^= (t == Trit::One);
      }
      return acc ? Trit::One : Trit::Zero;
    }
    case Op::Diff: {
      Trit a = eval_node_ternary(e->kids[0].get(), iv);
      Trit b = trit_not(eval_node_ternary(e->kids[1].get(), iv));
      // a AND b
      if (a == Trit::Zero || b == Trit::Zero) return Trit::Zero;
      if (a == Trit::Undef || b == Trit::Undef) return Trit::Undef;
      return Trit::One;
    }
    case Op::MinK: {
      // Interval count: definitely-true vs possibly-true children.
      int definite = 0, possible = 0;
      for (const auto& kid : e->kids) {
        Trit t = eval_node_ternary(kid.get(), iv);
        if (t == Trit::One) {
          ++definite;
          ++possible;
        } else if (t == Trit::Undef) {
          ++possible;
        }
      }
      if (definite >= e->k) return Trit::One;
      if (possible < e->k) return Trit::Zero;
      return Trit::Undef;
    }
  }
  return Trit::Undef;
}

}  // namespace

BoolFn BoolFn::from_expr(ExprPtr root, int min_arity) {
  if (!root) throw std::logic_error("BoolFn: null expression");
  BoolFn fn;
  fn.root_ = std::move(root);
  fn.n_ = std::max(min_arity, max_var(fn.root_) + 1);
  if (fn.n_ < 1) fn.n_ = 1;
  if (fn.n_ > IndicatorVec::kMaxN) throw std::logic_error("BoolFn: arity above 256");
  if (fn.n_ <= 16) {
    fn.table_.resize(size_t(1) << fn.n_);
    for (uint32_t a = 0; a < fn.table_.size(); ++a)
      fn.table_[a] = eval_node(fn.root_.get(), [&](int i) { return (a >> i) & 1u; }) ? 1 : 0;
  }
  return fn;
}

BoolFn BoolFn::from_table(int n, std::vector<uint8_t> bits) {
  if (n < 1 || n > 16 || bits.size() != (size_t(1) << n))
    throw std::logic_error("BoolFn: bad table size");
  BoolFn fn;
  fn.n_ = n;
  fn.table_ = std::move(bits);
  for (auto& b : fn.table_) b = b ? 1 : 0;
  return fn;
}

bool BoolFn::eval_bits(uint32_t assignment) const {
  if (!table_.empty()) return table_[assignment & ((size_t(1) << n_) - 1)] != 0;
  return eval_node(root_.get(), [&](int i) { return (assignment >> i) & 1u; });
}

bool BoolFn::eval_binary(const IndicatorVec& iv) const {
  assert(iv.n == n_);
  assert(iv.all_defined());
  if (!table_.empty()) return table_[iv.val[0] & ((size_t(1) << n_) - 1)] != 0;
  return eval_node(root_.get(),
                   [&](int i) { return (iv.val[i >> 6] >> (i & 63)) & 1ull; });
}

Trit BoolFn::eval_ternary(const IndicatorVec& iv) const {
  assert(iv.n == n_);
  if (root_) return eval_node_ternary(root_.get(), iv);
  // Table-backed functions (n <= 16): exact semantics by completing every
  // undefined slot both ways.
  std::array<int, 16> undef_slots;
  int k = 0;
  uint32_t base = uint32_t(iv.val[0]);
  for (int i = 0; i < n_; ++i) {
    Slot s = iv.get(i);
    if (s == Slot::Undef || s == Slot::Surf) undef_slots[k++] = i;
  }
  bool seen0 = false, seen1 = false;
  for (uint32_t a = 0; a < (1u << k); ++a) {
    uint32_t bits = base;
    for (int p = 0; p < k; ++p) {
      uint32_t m = 1u << undef_slots[p];
      bits = (a >> p) & 1u ? (bits | m) : (bits & ~m);
    }
    (eval_bits(bits) ? seen1 : seen0) = true;
    if (seen0 && seen1) return Trit::Undef;
  }
  return seen1 ? Trit::One : Trit::Zero;
}

uint8_t BoolFn::flip_probe(const IndicatorVec& base, std::span<const int> flip) const {
  assert(base.n == n_);
  const int k = int(flip.size());
  if (k < 1 || k > 3) throw std::logic_error("flip_probe: flip set size must be 1..3");
  IndicatorVec tmp = base;
  for (int p = 0; p < k; ++p) tmp.set(flip[p], Slot::Out);
  if (!tmp.all_defined())
    throw std::logic_error("flip_probe: slot outside the flip set is not fully defined");
  uint8_t out = 0;
  for (uint32_t a = 0; a < (1u << k); ++a) {
    for (int p = 0; p < k; ++p) {
      bool bit = (a >> (k - 1 - p)) & 1u;  // first listed slot = MSB of a
      tmp.set(flip[p], bit ? Slot::In : Slot::Out);
    }
    if (eval_binary(tmp)) out |= uint8_t(1u << a);
  }
  return out;
}

ExprPtr expand_min2_binary(int n) {
  if (n < 2) throw std::logic_error("expand_min2_binary: need at least 2 inputs");
  ExprPtr acc;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      ExprPtr term =
          Expr::make(Expr::Op::And, {Expr::make_var(i), Expr::make_var(j)});
      acc = acc ? Expr::make(Expr::Op::Or, {acc, term}) : term;
    }
  return acc;
}

BoolFn from_csg_tree(const ExprPtr& tree) {
  if (!is_binary_csg_tree(tree)) throw std::logic_error("from_csg_tree: not a binary CSG tree");
  return BoolFn::from_expr(tree);
}

namespace {

struct Lexer {
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(uint8_t(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool accept_str(const char* word) {
    skip_ws();
    size_t len = std::strlen(word);
    if (s.compare(pos, len, word) == 0) {
      pos += len;
      return true;
    }
    return false;
  }
  std::optional<int> accept_int() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(uint8_t(s[pos]))) ++pos;
    if (pos == start) return std::nullopt;
    return std::stoi(s.substr(start, pos - start));
  }
};

struct Parser {
  Lexer lx;
  ParseError err{0, ""};
  bool failed = false;

  ExprPtr fail(const std::string& msg) {
    if (!failed) err = {lx.pos, msg};
    failed = true;
    return nullptr;
  }

  std::optional<int> parse_input_ref() {
    if (!lx.accept('P')) return std::nullopt;
    auto i = lx.accept_int();
    if (!i) {
      fail("expected input index after 'P'");
      return std::nullopt;
    }
    if (*i >= IndicatorVec::kMaxN) {
      fail("input index above 255");
      return std::nullopt;
    }
    return i;
  }

  // arg := or-expr | P<i>..P<j>  (range pushes several leaves)
  bool parse_arg(std::vector<ExprPtr>& out) {
    size_t save = lx.pos;
    if (lx.peek() == 'P') {
      auto a = parse_input_ref();
      if (failed) return false;
      if (a && lx.accept_str("..")) {
        auto b = parse_input_ref();
        if (failed) return false;
        if (!b) {
          fail("expected 'P<j>' after '..'");
          return false;
        }
        if (*b < *a) {
          fail("descending range");
          return false;
        }
        for (int v = *a; v <= *b; ++v) out.push_back(Expr::make_var(v));
        return true;
      }
      lx.pos = save;  // plain P<i> may be part of a larger expression
    }
    ExprPtr e = parse_or();
    if (!e) return false;
    out.push_back(e);
    return true;
  }

  ExprPtr parse_call(Expr::Op op, int k) {
    if (!lx.accept('(')) return fail("expected '('");
    std::vector<ExprPtr> args;
    if (!parse_arg(args)) return nullptr;
    while (lx.accept(',')) {
      if (!parse_arg(args)) return nullptr;
    }
    if (!lx.accept(')')) return fail("expected ')' or ','");
    if (op == Expr::Op::MinK) {
      if (k < 1) return fail("min-k threshold must be positive");
      if (size_t(k) > args.size()) return fail("min-k threshold exceeds argument count");
    }
    if (args.size() == 1 && op != Expr::Op::MinK) return args[0];
    return Expr::make(op, std::move(args), k);
  }

  ExprPtr parse_atom() {
    lx.skip_ws();
    if (lx.accept_str("union")) return parse_call(Expr::Op::Or, 0);
    if (lx.accept_str("inter")) return parse_call(Expr::Op::And, 0);
    if (lx.accept_str("min")) {
      auto k = lx.accept_int();
      if (!k) return fail("expected integer after 'min'");
      return parse_call(Expr::Op::MinK, *k);
    }
    if (lx.peek() == 'P') {
      auto i = parse_input_ref();
      if (!i) return failed ? nullptr : fail("expected input reference");
      return Expr::make_var(*i);
    }
    if (lx.accept('(')) {
      ExprPtr e = parse_or();
      if (!e) return nullptr;
      if (!lx.accept(')')) return fail("expected ')'");
      return e;
    }
    return fail("expected 'P<i>', 'union', 'inter', 'min<k>' or '('");
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_atom();
    while (e && lx.peek() == '&') {
      lx.accept('&');
      ExprPtr rhs = parse_atom();
      if (!rhs) return nullptr;
      e = Expr::make(Expr::Op::And, {e, rhs});
    }
    return e;
  }

  ExprPtr parse_xor() {
    ExprPtr e = parse_and();
    while (e && lx.peek() == '^') {
      lx.accept('^');
      ExprPtr rhs = parse_and();
      if (!rhs) return nullptr;
      e = Expr::make(Expr::Op::Xor, {e, rhs});
    }
    return e;
  }

  ExprPtr parse_or() {
    ExprPtr e = parse_xor();
    while (e) {
      char c = lx.peek();
      if (c != '|' && c != '-') break;
      lx.accept(c);
      ExprPtr rhs = parse_xor();
      if (!rhs) return nullptr;
      e = Expr::make(c == '|' ? Expr::Op::Or : Expr::Op::Diff, {e, rhs});
    }
    return e;
  }
};

}  // namespace

std::optional<ExprPtr> parse_expr(const std::string& text, ParseError* err) {
  Parser p{Lexer{text}};
  ExprPtr e = p.parse_or();
  if (e && !p.lx.eof()) {
    p.fail("trailing input");
    e = nullptr;
  }
  if (!e) {
    if (err) *err = p.failed ? p.err : ParseError{p.lx.pos, "empty expression"};
    return std::nullopt;
  }
  return e;
}

std::string to_string(const ExprPtr& e) {
  using Op = Expr::Op;
  if (!e) return "<null>";
  switch (e->op) {
    case Op::Var:
      return "P" + std::to_string(e->var);
    case Op::Not:
      return "!(" + to_string(e->kids[0]) + ")";
    case Op::And:
    case Op::Or:
    case Op::Xor:
    case Op::Diff: {
      const char* sep = e->op == Op::And   ? " & "
                        : e->op == Op::Or  ? " | "
                        : e->op == Op::Xor ? " ^ "
                                           : " - ";
      std::string out = "(";
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) out += sep;
        out += to_string(e->kids[i]);
      }
      return out + ")";
    }
    case Op::MinK: {
      std::string out = "min" + std::to_string(e->k) + "(";
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) out += ", ";
        out += to_string(e->kids[i]);
      }
      return out + ")";
    }
  }
  return "<bad>";
}

}  // namespace ncsg
