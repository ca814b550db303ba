#include "ntan/expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "ntan/error.hpp"

namespace ntan {

struct Expr::Node {
  Op op;
  double value = 0.0;
  int n = 0;
  Expr a;
  Expr b;

  Node(Op op_, double value_, int n_, const Expr* a_, const Expr* b_)
      : op(op_),
        value(value_),
        n(n_),
        a(a_ ? *a_ : Expr(std::shared_ptr<const Node>{})),
        b(b_ ? *b_ : Expr(std::shared_ptr<const Node>{})) {}
};

namespace {

// Structurally equal nodes are shared (hash consing), so identity comparisons
// in the folding rules and the memoized transforms see through rebuilt copies.
struct NodeKey {
  Op op;
  std::uint64_t bits;
  int n;
  const void* a;
  const void* b;
  bool operator==(const NodeKey&) const = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const noexcept {
    std::size_t h = std::hash<std::uint64_t>{}(k.bits);
    const auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(static_cast<std::size_t>(k.op));
    mix(static_cast<std::size_t>(k.n));
    mix(std::hash<const void*>{}(k.a));
    mix(std::hash<const void*>{}(k.b));
    return h;
  }
};

struct NodeTable {
  std::mutex mutex;
  std::unordered_map<NodeKey, std::weak_ptr<const Expr::Node>, NodeKeyHash> nodes;
  std::size_t purge_at = 1 << 16;
};

NodeTable& node_table() {
  static NodeTable* table = new NodeTable;  // outlives static Exprs
  return *table;
}

}  // namespace

Expr make_node(Op op, double value, int n, const Expr* a, const Expr* b) {
  const NodeKey key{op, std::bit_cast<std::uint64_t>(value), n, a ? a->id() : nullptr,
                    b ? b->id() : nullptr};
  auto& table = node_table();
  std::lock_guard lock(table.mutex);
  auto& slot = table.nodes[key];
  if (auto existing = slot.lock()) return Expr(std::move(existing));
  auto node = std::make_shared<const Expr::Node>(op, value, n, a, b);
  slot = node;
  if (table.nodes.size() > table.purge_at) {
    std::erase_if(table.nodes, [](const auto& kv) { return kv.second.expired(); });
    table.purge_at = std::max<std::size_t>(1 << 16, 2 * table.nodes.size());
  }
  return Expr(std::move(node));
}

namespace {

const Expr& zero_expr() {
  static const Expr zero = make_node(Op::Const, 0.0, 0, nullptr, nullptr);
  return zero;
}

bool is_unary(Op op) { return op == Op::Neg || op == Op::Sin || op == Op::Cos || op == Op::Exp; }

bool is_binary(Op op) {
  return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}

double checked_div(double a, double b) {
  if (b == 0.0) throw Error(ErrorCode::DivisionByZero, "division by zero");
  return a / b;
}

double int_pow(double base, int n) {
  if (n < 0) {
    if (base == 0.0) throw Error(ErrorCode::DivisionByZero, "zero raised to a negative power");
    return 1.0 / int_pow(base, -n);
  }
  double result = 1.0;
  double b = base;
  unsigned e = static_cast<unsigned>(n);
  while (e) {
    if (e & 1u) result *= b;
    e >>= 1u;
    if (e) b *= b;
  }
  return result;
}

double apply_unary(Op op, double a) {
  switch (op) {
    case Op::Neg: return -a;
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Exp: return std::exp(a);
    default: break;
  }
  throw Error(ErrorCode::Evaluation, "not a unary operator");
}

double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return checked_div(a, b);
    default: break;
  }
  throw Error(ErrorCode::Evaluation, "not a binary operator");
}

}  // namespace

std::string variable_name(int id) {
  if (id == kParameterT) return "t";
  return "x" + std::to_string(id);
}

Expr::Expr() : node_(zero_expr().node_) {}
Expr::Expr(double value) : Expr(make_node(Op::Const, value, 0, nullptr, nullptr)) {}

Expr Expr::constant(double value) {
  if (value == 0.0 && !std::signbit(value)) return Expr();
  return Expr(value);
}

Expr Expr::variable(int id) { return make_node(Op::Var, 0.0, id, nullptr, nullptr); }

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
int Expr::variable() const noexcept { return node_->n; }
int Expr::exponent() const noexcept { return node_->n; }
const Expr& Expr::lhs() const noexcept { return node_->a; }
const Expr& Expr::rhs() const noexcept { return node_->b; }

namespace raw {

Expr unary(Op op, const Expr& a) { return make_node(op, 0.0, 0, &a, nullptr); }
Expr binary(Op op, const Expr& a, const Expr& b) { return make_node(op, 0.0, 0, &a, &b); }
Expr pow(const Expr& base, int exponent) { return make_node(Op::Pow, 0.0, exponent, &base, nullptr); }

}  // namespace raw

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (b.op() == Op::Neg) return a - b.lhs();
  if (a.op() == Op::Neg) return b - a.lhs();
  return raw::binary(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (a.id() == b.id()) return Expr();
  if (b.op() == Op::Neg) return a + b.lhs();
  return raw::binary(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  if (b.is_constant()) return raw::binary(Op::Mul, b, a);
  if (a.is_constant() && b.op() == Op::Mul && b.lhs().is_constant())
    return raw::binary(Op::Mul, Expr::constant(a.value() * b.lhs().value()), b.rhs());
  return raw::binary(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0)
    return Expr::constant(a.value() / b.value());
  if (b.is_constant(1.0)) return a;
  if (a.is_zero() && !b.is_zero()) return Expr();
  if (b.is_constant() && b.value() != 0.0) return Expr::constant(1.0 / b.value()) * a;
  return raw::binary(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.op() == Op::Neg) return a.lhs();
  return raw::unary(Op::Neg, a);
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1.0);
  if (exponent == 1) return base;
  if (base.is_constant() && !(base.value() == 0.0 && exponent < 0))
    return Expr::constant(int_pow(base.value(), exponent));
  return raw::pow(base, exponent);
}

Expr sin(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::sin(a.value()));
  return raw::unary(Op::Sin, a);
}

Expr cos(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::cos(a.value()));
  return raw::unary(Op::Cos, a);
}

Expr exp(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::exp(a.value()));
  return raw::unary(Op::Exp, a);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options) : text_(text), opts_(options) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what, ErrorCode code = ErrorCode::Parse) const {
    throw ParseError(code, what, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = raw::binary(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = raw::binary(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = raw::binary(Op::Mul, lhs, factor());
      } else if (accept('/')) {
        lhs = raw::binary(Op::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    const bool negate = accept('-');
    Expr base = atom();
    if (accept('^')) base = raw::pow(base, integer());
    return negate ? raw::unary(Op::Neg, base) : base;
  }

  int integer() {
    skip_ws();
    const bool negative = pos_ < text_.size() && text_[pos_] == '-';
    if (negative) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc()) {
      pos_ = start;
      fail("exponent out of range");
    }
    return negative ? -value : value;
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "sin" || name == "cos" || name == "exp") {
      const Op op = name == "sin" ? Op::Sin : name == "cos" ? Op::Cos : Op::Exp;
      expect('(');
      Expr arg = expr();
      expect(')');
      return raw::unary(op, arg);
    }
    auto unknown = [&]() {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'", ErrorCode::UnknownIdentifier);
    };
    if (name == "t") {
      if (!opts_.allow_t) unknown();
      return Expr::variable(kParameterT);
    }
    if (name.size() >= 2 && name[0] == 'x') {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec != std::errc() || ptr != name.data() + name.size() || index < 1) unknown();
      if (!opts_.allow_space || (opts_.dimension > 0 && index > opts_.dimension)) unknown();
      return Expr::variable(index);
    }
    unknown();
    return Expr();
  }

  std::string_view text_;
  ParseOptions opts_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void print(const Expr& e, std::string& out, std::unordered_map<const void*, std::string>& memo);

std::string printed(const Expr& e, std::unordered_map<const void*, std::string>& memo) {
  auto it = memo.find(e.id());
  if (it != memo.end()) return it->second;
  std::string s;
  print(e, s, memo);
  memo.emplace(e.id(), s);
  return s;
}

std::string as_atom(const Expr& e, std::unordered_map<const void*, std::string>& memo) {
  std::string s = printed(e, memo);
  if (e.op() == Op::Pow) return "(" + s + ")";
  return s;
}

void print(const Expr& e, std::string& out, std::unordered_map<const void*, std::string>& memo) {
  switch (e.op()) {
    case Op::Const:
      if (std::signbit(e.value()))
        out += "(-" + format_number(-e.value()) + ")";
      else
        out += format_number(e.value());
      return;
    case Op::Var:
      out += variable_name(e.variable());
      return;
    case Op::Neg:
      out += "(-" + as_atom(e.lhs(), memo) + ")";
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp: {
      const char* fn = e.op() == Op::Sin ? "sin" : e.op() == Op::Cos ? "cos" : "exp";
      out += std::string(fn) + "(" + printed(e.lhs(), memo) + ")";
      return;
    }
    case Op::Pow:
      out += as_atom(e.lhs(), memo) + "^" + std::to_string(e.exponent());
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const char* sym = e.op() == Op::Add ? " + " : e.op() == Op::Sub ? " - "
                        : e.op() == Op::Mul ? " * " : " / ";
      out += "(" + printed(e.lhs(), memo) + sym + printed(e.rhs(), memo) + ")";
      return;
    }
  }
}

using Memo = std::unordered_map<const void*, Expr>;

Expr rebuild(const Expr& e, const Expr& a, const Expr& b) {
  switch (e.op()) {
    case Op::Neg: return -a;
    case Op::Sin: return sin(a);
    case Op::Cos: return cos(a);
    case Op::Exp: return exp(a);
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Pow: return pow(a, e.exponent());
    default: return e;
  }
}

Expr derive(const Expr& e, int v, Memo& memo) {
  auto it = memo.find(e.id());
  if (it != memo.end()) return it->second;
  Expr d;
  switch (e.op()) {
    case Op::Const:
      break;
    case Op::Var:
      d = Expr(e.variable() == v ? 1.0 : 0.0);
      break;
    case Op::Neg:
      d = -derive(e.lhs(), v, memo);
      break;
    case Op::Sin:
      d = cos(e.lhs()) * derive(e.lhs(), v, memo);
      break;
    case Op::Cos:
      d = -(sin(e.lhs()) * derive(e.lhs(), v, memo));
      break;
    case Op::Exp:
      d = e * derive(e.lhs(), v, memo);
      break;
    case Op::Add:
      d = derive(e.lhs(), v, memo) + derive(e.rhs(), v, memo);
      break;
    case Op::Sub:
      d = derive(e.lhs(), v, memo) - derive(e.rhs(), v, memo);
      break;
    case Op::Mul:
      d = derive(e.lhs(), v, memo) * e.rhs() + e.lhs() * derive(e.rhs(), v, memo);
      break;
    case Op::Div: {
      const Expr da = derive(e.lhs(), v, memo);
      const Expr db = derive(e.rhs(), v, memo);
      d = da / e.rhs() - (e.lhs() * db) / pow(e.rhs(), 2);
      break;
    }
    case Op::Pow: {
      const int n = e.exponent();
      d = Expr(static_cast<double>(n)) * pow(e.lhs(), n - 1) * derive(e.lhs(), v, memo);
      break;
    }
  }
  memo.emplace(e.id(), d);
  return d;
}

template <class Leaf>
Expr transform(const Expr& e, Memo& memo, const Leaf& leaf) {
  auto it = memo.find(e.id());
  if (it != memo.end()) return it->second;
  Expr r;
  if (e.op() == Op::Const || e.op() == Op::Var) {
    r = leaf(e);
  } else {
    const Expr a = transform(e.lhs(), memo, leaf);
    const Expr b = is_binary(e.op()) ? transform(e.rhs(), memo, leaf) : Expr();
    r = rebuild(e, a, b);
  }
  memo.emplace(e.id(), r);
  return r;
}

template <class Visit>
void visit_unique(const Expr& e, std::unordered_set<const void*>& seen, const Visit& visit) {
  if (!seen.insert(e.id()).second) return;
  visit(e);
  if (e.op() == Op::Const || e.op() == Op::Var) return;
  visit_unique(e.lhs(), seen, visit);
  if (is_binary(e.op())) visit_unique(e.rhs(), seen, visit);
}

}  // namespace

Expr parse(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).run();
}

std::string to_string(const Expr& e) {
  std::unordered_map<const void*, std::string> memo;
  return printed(e, memo);
}

Expr differentiate(const Expr& e, int variable) {
  Memo memo;
  return derive(e, variable, memo);
}

std::vector<Expr> differentiate(std::span<const Expr> es, int variable) {
  Memo memo;
  std::vector<Expr> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(derive(e, variable, memo));
  return out;
}

Expr substitute(const Expr& e, std::span<const Expr> values) {
  return substitute(std::span<const Expr>(&e, 1), values).front();
}

std::vector<Expr> substitute(std::span<const Expr> es, std::span<const Expr> values) {
  Memo memo;
  const auto leaf = [&](const Expr& x) {
    if (x.op() == Op::Var && x.variable() >= 1 &&
        static_cast<std::size_t>(x.variable()) <= values.size())
      return values[static_cast<std::size_t>(x.variable()) - 1];
    return x;
  };
  std::vector<Expr> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(transform(e, memo, leaf));
  return out;
}

Expr simplify(const Expr& e) {
  Memo memo;
  return transform(e, memo, [](const Expr& leaf) { return leaf; });
}

std::size_t node_count(const Expr& e) { return node_count(std::span<const Expr>(&e, 1)); }

std::size_t node_count(std::span<const Expr> es) {
  std::unordered_set<const void*> seen;
  for (const auto& e : es) visit_unique(e, seen, [](const Expr&) {});
  return seen.size();
}

bool depends_on(const Expr& e, int variable) {
  bool found = false;
  std::unordered_set<const void*> seen;
  visit_unique(e, seen, [&](const Expr& n) {
    if (n.op() == Op::Var && n.variable() == variable) found = true;
  });
  return found;
}

int max_space_index(const Expr& e) {
  int best = 0;
  std::unordered_set<const void*> seen;
  visit_unique(e, seen, [&](const Expr& n) {
    if (n.op() == Op::Var && n.variable() > best) best = n.variable();
  });
  return best;
}

double evaluate(const Expr& e, const Env& env) {
  const Program program(std::span<const Expr>(&e, 1));
  double out = 0.0;
  program.evaluate(env, std::span<double>(&out, 1));
  return out;
}

double evaluate(const Expr& e, const std::map<std::string, double>& bindings) {
  Env env;
  std::vector<double> x;
  for (const auto& [name, value] : bindings) {
    if (name == "t") {
      env.t = value;
      continue;
    }
    const Expr var = parse(name);
    if (var.op() != Op::Var) throw Error(ErrorCode::InvalidArgument, "bad variable name " + name);
    const auto k = static_cast<std::size_t>(var.variable());
    if (x.size() < k) x.resize(k, std::numeric_limits<double>::quiet_NaN());
    x[k - 1] = value;
  }
  // Unbound coordinates are NaN placeholders; reject them explicitly.
  std::unordered_set<const void*> seen;
  visit_unique(e, seen, [&](const Expr& n) {
    if (n.op() != Op::Var) return;
    const int k = n.variable();
    if (k == kParameterT) return;
    if (static_cast<std::size_t>(k) > x.size() || std::isnan(x[static_cast<std::size_t>(k) - 1]))
      throw Error(ErrorCode::UnboundVariable, "unbound variable " + variable_name(k));
  });
  env.x = x;
  return evaluate(e, env);
}

// ---------------------------------------------------------------------------
// Program

Program::Program(std::span<const Expr> outputs) {
  std::unordered_map<const void*, int> slot;
  // Iterative post-order so deep sums do not exhaust the stack.
  std::function<int(const Expr&)> emit = [&](const Expr& root) -> int {
    std::vector<std::pair<Expr, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [e, expanded] = stack.back();
      stack.pop_back();
      if (slot.count(e.id())) continue;
      const bool leaf = e.op() == Op::Const || e.op() == Op::Var;
      if (!leaf && !expanded) {
        stack.push_back({e, true});
        if (is_binary(e.op())) stack.push_back({e.rhs(), false});
        stack.push_back({e.lhs(), false});
        continue;
      }
      Instr ins{e.op()};
      if (e.op() == Op::Const) ins.value = e.value();
      if (e.op() == Op::Var) ins.n = e.variable();
      if (e.op() == Op::Pow) ins.n = e.exponent();
      if (!leaf) ins.a = slot.at(e.lhs().id());
      if (is_binary(e.op())) ins.b = slot.at(e.rhs().id());
      slot.emplace(e.id(), static_cast<int>(code_.size()));
      code_.push_back(ins);
    }
    return slot.at(root.id());
  };
  outputs_.reserve(outputs.size());
  for (const auto& e : outputs) outputs_.push_back(emit(e));
}

void Program::evaluate(const Env& env, std::span<double> out) const {
  if (out.size() != outputs_.size())
    throw Error(ErrorCode::InvalidArgument, "program output span has wrong size");
  thread_local std::vector<double> reg;
  reg.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& ins = code_[i];
    double r = 0.0;
    switch (ins.op) {
      case Op::Const:
        r = ins.value;
        break;
      case Op::Var:
        if (ins.n == kParameterT) {
          if (!env.t) throw Error(ErrorCode::UnboundVariable, "unbound variable t");
          r = *env.t;
        } else {
          const auto k = static_cast<std::size_t>(ins.n);
          if (k > env.x.size())
            throw Error(ErrorCode::UnboundVariable, "unbound variable " + variable_name(ins.n));
          r = env.x[k - 1];
        }
        break;
      case Op::Pow:
        r = int_pow(reg[static_cast<std::size_t>(ins.a)], ins.n);
        break;
      default:
        if (is_unary(ins.op))
          r = apply_unary(ins.op, reg[static_cast<std::size_t>(ins.a)]);
        else
          r = apply_binary(ins.op, reg[static_cast<std::size_t>(ins.a)],
                           reg[static_cast<std::size_t>(ins.b)]);
        break;
    }
    reg[i] = r;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = reg[static_cast<std::size_t>(outputs_[k])];
}

std::vector<double> Program::evaluate(const Env& env) const {
  std::vector<double> out(outputs_.size());
  evaluate(env, out);
  return out;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::UnknownIdentifier: return "unknown-identifier";
    case ErrorCode::UnboundVariable: return "unbound-variable";
    case ErrorCode::DivisionByZero: return "division-by-zero";
    case ErrorCode::Evaluation: return "evaluation";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::GeodesicEscape: return "geodesic-escape";
    case ErrorCode::IntegrationTolerance: return "integration-tolerance";
    case ErrorCode::FrameDegenerate: return "frame-degenerate";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace ntan
