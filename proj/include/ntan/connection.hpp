#pragma once

// Affine connections given by Christoffel symbols Gamma^l_{mu nu}(x).
//
// Index convention throughout the C++ API is 0-based; Gamma^l_{mu nu} is stored
// at (l * m + mu) * m + nu and its partial d/dx^k at ((l * m + mu) * m + nu) * m + k.
// The covariant derivative along a curve reads
//   (nabla v)^l = v'^l + Gamma^l_{mu nu} (gamma')^mu v^nu.

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ntan/expr.hpp"

namespace ntan {

inline constexpr int kMaxDimension = 6;

class Connection {
 public:
  using Callback = std::function<void(std::span<const double> x, std::span<double> gamma)>;

  // Flat connection, Gamma == 0.
  explicit Connection(int m);

  // `gamma` holds m^3 expressions in x1..xm.
  static Connection symbolic(int m, std::vector<Expr> gamma);

  // Sparse table keyed by 1-based "l,mu,nu"; omitted entries are zero.
  static Connection from_table(int m, const std::map<std::string, std::string>& table);

  // Numeric Christoffel symbols; partial derivatives are taken by central
  // differences with step 1e-5.
  static Connection from_callback(int m, Callback gamma, bool torsion_free);

  int dimension() const noexcept;
  bool is_symbolic() const noexcept;
  // Every symbol is the constant zero.
  bool is_flat() const noexcept;
  // Symmetric in the lower indices, by construction or on the probe grid.
  bool torsion_free() const noexcept;

  std::size_t index(int l, int mu, int nu) const noexcept {
    const auto m = static_cast<std::size_t>(dimension());
    return (static_cast<std::size_t>(l) * m + static_cast<std::size_t>(mu)) * m +
           static_cast<std::size_t>(nu);
  }

  // Symbolic connections only.
  const std::vector<Expr>& symbols() const;
  const Expr& symbol(int l, int mu, int nu) const;

  void christoffel(std::span<const double> x, std::span<double> out) const;
  std::vector<double> christoffel(std::span<const double> x) const;

  void christoffel_partials(std::span<const double> x, std::span<double> out) const;
  std::vector<double> christoffel_partials(std::span<const double> x) const;
  double christoffel_partial(int l, int mu, int nu, int k, std::span<const double> x) const;

  // T^l_{mu nu} = Gamma^l_{mu nu} - Gamma^l_{nu mu}
  std::vector<double> torsion_tensor(std::span<const double> x) const;

  // Gamma~^l_{mu nu} = (Gamma^l_{mu nu} + Gamma^l_{nu mu}) / 2; same geodesics.
  Connection symmetrized() const;

  struct Impl;

 private:
  explicit Connection(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Levi-Civita connection of a metric g_{ij}(x) given as m*m row-major
// expressions.  The inverse enters through the adjugate over det g, so the
// result is symbolic; evaluation fails with DivisionByZero where g is singular.
Connection levi_civita(int m, std::vector<Expr> metric);

// Probe points used to certify symmetry: the 5^m grid on [-1, 1]^m, thinned to
// at most 625 points for m > 4.
std::vector<std::vector<double>> probe_grid(int m);

}  // namespace ntan
