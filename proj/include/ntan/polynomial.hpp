#pragma once

#include <optional>
#include <vector>

#include "ntan/expr.hpp"

namespace ntan {

// Dense univariate polynomial, coefficients in increasing degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  static Polynomial monomial(int degree, double coefficient = 1.0);

  const std::vector<double>& coefficients() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  double operator()(double t) const;

  Polynomial derivative() const;
  // Antiderivative vanishing at `anchor`, plus `value`.
  Polynomial integral(double anchor, double value) const;
  // Coefficients of the expansion in powers of (t - t0).
  Polynomial shifted(double t0) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& a);

  // Sum of c_j * t^j as an expression in t.
  Expr to_expr() const;
  // Expression sum of c_j * (t - center)^j, treating the coefficients as a
  // Taylor expansion around `center`.
  Expr to_expr_about(double center) const;

 private:
  void trim();
  std::vector<double> c_;
};

// Recovers the coefficients of a polynomial expression in t; nullopt when the
// expression uses space variables, transcendental functions, negative powers or
// division by a non-constant.
std::optional<Polynomial> to_polynomial(const Expr& e);

}  // namespace ntan
