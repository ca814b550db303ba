#pragma once

// Symbolic scalar expressions in the space coordinates x1..xm and the curve
// parameter t.  Expressions are immutable DAGs of shared nodes; every
// transformation (differentiate, substitute, simplify) memoizes on node identity
// so that shared subtrees stay shared.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ntan {

// Variable ids: 0 is the curve parameter t, k >= 1 is the space coordinate x_k.
inline constexpr int kParameterT = 0;

std::string variable_name(int id);

enum class Op : std::uint8_t { Const, Var, Neg, Sin, Cos, Exp, Add, Sub, Mul, Div, Pow };

class Expr {
 public:
  Expr();
  explicit Expr(double value);

  static Expr constant(double value);
  static Expr variable(int id);

  Op op() const noexcept;
  double value() const noexcept;  // Const only
  int variable() const noexcept;  // Var only
  int exponent() const noexcept;  // Pow only
  const Expr& lhs() const noexcept;
  const Expr& rhs() const noexcept;

  bool is_constant() const noexcept { return op() == Op::Const; }
  bool is_constant(double v) const noexcept { return is_constant() && value() == v; }
  bool is_zero() const noexcept { return is_constant(0.0); }

  // Node identity; equal ids imply structurally equal expressions.
  const void* id() const noexcept { return node_.get(); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_node(Op, double, int, const Expr*, const Expr*);
};

// Unfolded constructors, used by the parser so that the tree mirrors the source.
namespace raw {
Expr unary(Op op, const Expr& a);
Expr binary(Op op, const Expr& a, const Expr& b);
Expr pow(const Expr& base, int exponent);
}  // namespace raw

// Folding constructors: constant subtrees are evaluated, additive and
// multiplicative identities are dropped.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);

struct ParseOptions {
  int dimension = 0;  // highest admissible x index; 0 admits any
  bool allow_t = true;
  bool allow_space = true;
};

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-')? atom ('^' ['-'] integer)?
//   atom   := number | ident | func '(' expr ')' | '(' expr ')'
//   func   := 'sin' | 'cos' | 'exp'
//   ident  := 't' | 'x' digit+
Expr parse(std::string_view text, const ParseOptions& options = {});

// Fully parenthesized, round-trips through parse.
std::string to_string(const Expr& e);

Expr differentiate(const Expr& e, int variable);
// Shares one memo across the whole set, so common subtrees stay common.
std::vector<Expr> differentiate(std::span<const Expr> es, int variable);

// Replaces x_k by values[k-1] for every k <= values.size(); t is untouched.
Expr substitute(const Expr& e, std::span<const Expr> values);
std::vector<Expr> substitute(std::span<const Expr> es, std::span<const Expr> values);

// Re-applies the folding constructors bottom-up.
Expr simplify(const Expr& e);

std::size_t node_count(const Expr& e);
std::size_t node_count(std::span<const Expr> es);
bool depends_on(const Expr& e, int variable);
int max_space_index(const Expr& e);

struct Env {
  std::optional<double> t;
  std::span<const double> x;
};

double evaluate(const Expr& e, const Env& env);
double evaluate(const Expr& e, const std::map<std::string, double>& bindings);

// A set of expressions flattened into one instruction tape over their shared
// nodes.  Evaluation visits every distinct node exactly once.
class Program {
 public:
  Program() = default;
  explicit Program(std::span<const Expr> outputs);

  void evaluate(const Env& env, std::span<double> out) const;
  std::vector<double> evaluate(const Env& env) const;

  std::size_t size() const noexcept { return code_.size(); }
  std::size_t outputs() const noexcept { return outputs_.size(); }

 private:
  struct Instr {
    Op op;
    int a = -1;
    int b = -1;
    int n = 0;  // exponent or variable id
    double value = 0.0;
  };
  std::vector<Instr> code_;
  std::vector<int> outputs_;
};

}  // namespace ntan
