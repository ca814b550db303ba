#include "ntan/polynomial.hpp"

#include <algorithm>
#include <unordered_map>

namespace ntan {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) { trim(); }

Polynomial Polynomial::monomial(int degree, double coefficient) {
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  c.back() = coefficient;
  return Polynomial(std::move(c));
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double t) const {
  double r = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * t + *it;
  return r;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t j = 1; j < c_.size(); ++j) d[j - 1] = static_cast<double>(j) * c_[j];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::integral(double anchor, double value) const {
  std::vector<double> r(c_.size() + 1, 0.0);
  for (std::size_t j = 0; j < c_.size(); ++j) r[j + 1] = c_[j] / static_cast<double>(j + 1);
  Polynomial p(std::move(r));
  const double shift = value - p(anchor);
  if (p.c_.empty()) p.c_.push_back(0.0);
  p.c_[0] += shift;
  p.trim();
  return p;
}

Polynomial Polynomial::shifted(double t0) const {
  // Repeated synthetic division by (t - t0).
  std::vector<double> work = c_;
  std::vector<double> out;
  out.reserve(work.size());
  while (!work.empty()) {
    double carry = 0.0;
    for (auto it = work.rbegin(); it != work.rend(); ++it) {
      carry = carry * t0 + *it;
      *it = carry;
    }
    out.push_back(work.front());
    work.erase(work.begin());
  }
  return Polynomial(std::move(out));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t j = 0; j < a.c_.size(); ++j) r[j] += a.c_[j];
  for (std::size_t j = 0; j < b.c_.size(); ++j) r[j] += b.c_[j];
  return Polynomial(std::move(r));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return {};
  std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(r));
}

Polynomial operator*(double k, const Polynomial& a) {
  std::vector<double> r = a.c_;
  for (auto& x : r) x *= k;
  return Polynomial(std::move(r));
}

Expr Polynomial::to_expr() const { return to_expr_about(0.0); }

Expr Polynomial::to_expr_about(double center) const {
  const Expr t = Expr::variable(kParameterT);
  const Expr base = center == 0.0 ? t : t - Expr(center);
  Expr sum;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] == 0.0) continue;
    sum = sum + Expr::constant(c_[j]) * pow(base, static_cast<int>(j));
  }
  return sum;
}

namespace {

std::optional<Polynomial> convert(const Expr& e,
                                  std::unordered_map<const void*, std::optional<Polynomial>>& memo) {
  auto it = memo.find(e.id());
  if (it != memo.end()) return it->second;
  std::optional<Polynomial> r;
  switch (e.op()) {
    case Op::Const:
      r = Polynomial({e.value()});
      break;
    case Op::Var:
      if (e.variable() == kParameterT) r = Polynomial({0.0, 1.0});
      break;
    case Op::Neg:
      if (auto a = convert(e.lhs(), memo)) r = -1.0 * *a;
      break;
    case Op::Add:
    case Op::Sub: {
      auto a = convert(e.lhs(), memo);
      auto b = convert(e.rhs(), memo);
      if (a && b) r = *a + (e.op() == Op::Sub ? -1.0 * *b : *b);
      break;
    }
    case Op::Mul: {
      auto a = convert(e.lhs(), memo);
      auto b = convert(e.rhs(), memo);
      if (a && b) r = *a * *b;
      break;
    }
    case Op::Div: {
      auto a = convert(e.lhs(), memo);
      if (a && e.rhs().is_constant() && e.rhs().value() != 0.0) r = (1.0 / e.rhs().value()) * *a;
      break;
    }
    case Op::Pow: {
      if (e.exponent() < 0) break;
      auto a = convert(e.lhs(), memo);
      if (!a) break;
      Polynomial p({1.0});
      for (int k = 0; k < e.exponent(); ++k) p = p * *a;
      r = p;
      break;
    }
    default:
      break;
  }
  memo.emplace(e.id(), r);
  return r;
}

}  // namespace

std::optional<Polynomial> to_polynomial(const Expr& e) {
  std::unordered_map<const void*, std::optional<Polynomial>> memo;
  return convert(e, memo);
}

}  // namespace ntan
