#pragma once

// Covariant derivatives along curves and the rank signatures built from them.
//
// For a curve gamma(t) and a vector field v(t) along it,
//   (nabla v)^l = dv^l/dt + Gamma^l_{mu nu}(gamma(t)) (gamma')^mu v^nu.
// The curve tower is nabla gamma = gamma', nabla^k gamma = nabla(nabla^{k-1} gamma);
// a frame tower starts from a frame u instead of gamma'.

#include <string>
#include <vector>

#include "ntan/connection.hpp"
#include "ntan/expr.hpp"
#include "ntan/linalg.hpp"

namespace ntan {

struct CurveSpec {
  std::vector<Expr> components;  // gamma^l(t)
  double t_lo = -1.0;
  double t_hi = 1.0;

  int dimension() const noexcept { return static_cast<int>(components.size()); }
};

// Components must be expressions in t only.
CurveSpec make_curve(std::vector<Expr> components, double t_lo = -1.0, double t_hi = 1.0);
CurveSpec parse_curve(const std::vector<std::string>& components, double t_lo = -1.0,
                      double t_hi = 1.0);
Vec evaluate_curve(const std::vector<Expr>& components, double t);

// gamma' = factor * frame, frame nowhere zero on the interval.
struct DirectedCurveSpec {
  CurveSpec curve;
  std::vector<Expr> frame;
  Expr factor;
};

// Checks |c u - gamma'| <= 1e-10 and |u| > 1e-8 on 101 points of the interval.
DirectedCurveSpec make_directed(CurveSpec curve, std::vector<Expr> frame, Expr factor);
// u = gamma', c = 1.
DirectedCurveSpec immersed_frame(const CurveSpec& curve);

// Symbolic connections only; Gamma is composed with gamma by substitution.
std::vector<Expr> covariant_derive_along(const Connection& c, const CurveSpec& curve,
                                         const std::vector<Expr>& v);

// Rows [nabla gamma, ..., nabla^{k_max} gamma].  Throws Unsupported for
// callback connections or when a row exceeds the node cap.
std::vector<std::vector<Expr>> curve_tower(const Connection& c, const CurveSpec& curve, int k_max);

struct TowerOptions {
  std::size_t node_cap = 200000;  // per row
  double fd_step = 1e-3;          // numeric rows: 5-point stencil in t
};

// Tower of iterated covariant derivatives of `base` along the curve.  Row 0 is
// `base`.  Rows stay symbolic while they fit under the node cap; later rows are
// evaluated by differencing the previous row in t and adding the Gamma term
// pointwise.
class Tower {
 public:
  Tower(const Connection& c, const CurveSpec& curve, std::vector<Expr> base, int rows,
        const TowerOptions& options = {});

  int rows() const noexcept { return rows_; }
  int dimension() const noexcept { return m_; }
  int symbolic_rows() const noexcept { return static_cast<int>(exprs_.size()); }
  const std::vector<Expr>& expressions(int k) const;

  Vec row(int k, double t) const;
  // Rows 0..count-1 at t.
  std::vector<Vec> rows_at(double t, int count) const;
  Vec position(double t) const;
  Vec velocity(double t) const;
  // A(t) with (nabla v) = v' + A v, A^l_nu = Gamma^l_{mu nu}(gamma) (gamma')^mu.
  Mat transport_matrix(double t) const;

 private:
  void evaluate_symbolic(double t, std::vector<double>& out) const;
  Vec numeric_row(int k, double t) const;

  Connection c_;
  int m_ = 0;
  int rows_ = 0;
  TowerOptions options_;
  std::vector<std::vector<Expr>> exprs_;
  // Outputs: gamma, gamma', A (row-major), then the symbolic rows.
  Program program_;
  bool symbolic_transport_ = false;
};

// (a_1, ..., a_r) with r <= m; fewer than m entries means the remaining ones
// were not reached by k_max.
struct TypeSignature {
  std::vector<int> entries;
  int dimension = 0;
  int k_max = 0;

  bool complete() const noexcept { return static_cast<int>(entries.size()) == dimension; }
  // "(1,2,3)", or "(2,3,>5)" when undetermined beyond k_max = 5.
  std::string to_string() const;
  friend bool operator==(const TypeSignature&, const TypeSignature&) = default;
};

// Rank profile of columns[0..k): a_l is the first count at which the rank
// reaches l.  Columns are normalized by max(1, |col|); a singular value counts
// when it exceeds tol * max(1, largest singular value of the whole set).
TypeSignature type_signature(const std::vector<Vec>& columns, int m, double tol);

TypeSignature nabla_type(const Connection& c, const CurveSpec& curve, double t0, int k_max = 0,
                         double tol = 1e-8);
TypeSignature frame_type(const Connection& c, const DirectedCurveSpec& d, double t0,
                         int k_max = 0, double tol = 1e-8);

// Frame u = gamma' / (k (t - t0)^{k-1}) with c = k (t - t0)^{k-1}.  For k >= 2
// gamma' must be polynomial and divisible by (t - t0)^{k-1}.
DirectedCurveSpec directed_frame(const Connection& c, const CurveSpec& curve, double t0, int k);

}  // namespace ntan
