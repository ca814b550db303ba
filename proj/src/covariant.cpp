#include "ntan/covariant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ntan/error.hpp"
#include "ntan/polynomial.hpp"

namespace ntan {

namespace {

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void require_t_only(const std::vector<Expr>& es, const char* what) {
  for (const auto& e : es)
    if (max_space_index(e) > 0)
      throw Error(ErrorCode::UnknownIdentifier, std::string(what) + " may only depend on t");
}

Vec slice(const std::vector<double>& v, std::size_t offset, int m) {
  Vec r(m);
  for (int i = 0; i < m; ++i) r(i) = v[offset + static_cast<std::size_t>(i)];
  return r;
}

// A^l_nu = sum_mu Gamma^l_{mu nu}(gamma) (gamma')^mu
std::vector<Expr> symbolic_transport(const Connection& c, const CurveSpec& curve,
                                     const std::vector<Expr>& velocity) {
  const int m = c.dimension();
  const auto composed = substitute(std::span<const Expr>(c.symbols()), curve.components);
  std::vector<Expr> a(static_cast<std::size_t>(m * m));
  for (int l = 0; l < m; ++l)
    for (int nu = 0; nu < m; ++nu) {
      Expr sum;
      for (int mu = 0; mu < m; ++mu) {
        const Expr& g = composed[c.index(l, mu, nu)];
        if (!g.is_zero()) sum = sum + g * velocity[static_cast<std::size_t>(mu)];
      }
      a[static_cast<std::size_t>(l * m + nu)] = sum;
    }
  return a;
}

std::vector<Expr> apply_derivative(const std::vector<Expr>& transport, const std::vector<Expr>& v) {
  const auto m = v.size();
  auto out = differentiate(std::span<const Expr>(v), kParameterT);
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t nu = 0; nu < m; ++nu) {
      const Expr& a = transport[l * m + nu];
      if (!a.is_zero() && !v[nu].is_zero()) out[l] = out[l] + a * v[nu];
    }
  return out;
}

void check_curve(const Connection& c, const CurveSpec& curve) {
  if (curve.dimension() != c.dimension())
    throw Error(ErrorCode::InvalidArgument, "curve dimension differs from the connection");
}

}  // namespace

CurveSpec make_curve(std::vector<Expr> components, double t_lo, double t_hi) {
  if (components.empty() || static_cast<int>(components.size()) > kMaxDimension)
    throw Error(ErrorCode::InvalidArgument, "curve needs between 1 and 6 components");
  if (!(t_lo < t_hi)) throw Error(ErrorCode::InvalidArgument, "empty parameter interval");
  require_t_only(components, "curve components");
  return CurveSpec{std::move(components), t_lo, t_hi};
}

CurveSpec parse_curve(const std::vector<std::string>& components, double t_lo, double t_hi) {
  std::vector<Expr> es;
  ParseOptions opt;
  opt.allow_space = false;
  for (const auto& s : components) es.push_back(parse(s, opt));
  return make_curve(std::move(es), t_lo, t_hi);
}

Vec evaluate_curve(const std::vector<Expr>& components, double t) {
  Vec r(static_cast<Eigen::Index>(components.size()));
  for (std::size_t i = 0; i < components.size(); ++i)
    r(static_cast<Eigen::Index>(i)) = evaluate(components[i], Env{t, {}});
  return r;
}

DirectedCurveSpec make_directed(CurveSpec curve, std::vector<Expr> frame, Expr factor) {
  if (frame.size() != curve.components.size())
    throw Error(ErrorCode::InvalidArgument, "frame dimension differs from the curve");
  require_t_only(frame, "frame components");
  require_t_only({factor}, "factor");
  const auto velocity = differentiate(std::span<const Expr>(curve.components), kParameterT);
  std::vector<Expr> all = velocity;
  all.insert(all.end(), frame.begin(), frame.end());
  all.push_back(factor);
  const Program program(all);
  const auto m = frame.size();
  std::vector<double> out(all.size());
  for (int i = 0; i <= 100; ++i) {
    const double t = curve.t_lo + (curve.t_hi - curve.t_lo) * i / 100.0;
    program.evaluate(Env{t, {}}, out);
    double norm2 = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
      const double u = out[m + l];
      norm2 += u * u;
      if (std::abs(out[2 * m] * u - out[l]) > 1e-10)
        throw Error(ErrorCode::Validation,
                    "factor * frame differs from the curve velocity at t = " + short_number(t));
    }
    if (std::sqrt(norm2) <= 1e-8)
      throw Error(ErrorCode::Validation, "frame vanishes at t = " + short_number(t));
  }
  return DirectedCurveSpec{std::move(curve), std::move(frame), std::move(factor)};
}

DirectedCurveSpec immersed_frame(const CurveSpec& curve) {
  return DirectedCurveSpec{curve, differentiate(std::span<const Expr>(curve.components), kParameterT),
                           Expr(1.0)};
}

std::vector<Expr> covariant_derive_along(const Connection& c, const CurveSpec& curve,
                                         const std::vector<Expr>& v) {
  check_curve(c, curve);
  if (v.size() != curve.components.size())
    throw Error(ErrorCode::InvalidArgument, "vector field dimension differs from the curve");
  if (!c.is_symbolic())
    throw Error(ErrorCode::Unsupported, "symbolic covariant derivative needs a symbolic connection");
  const auto velocity = differentiate(std::span<const Expr>(curve.components), kParameterT);
  return apply_derivative(symbolic_transport(c, curve, velocity), v);
}

std::vector<std::vector<Expr>> curve_tower(const Connection& c, const CurveSpec& curve, int k_max) {
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be at least 1");
  Tower tower(c, curve, differentiate(std::span<const Expr>(curve.components), kParameterT), k_max);
  if (tower.symbolic_rows() < k_max)
    throw Error(ErrorCode::Unsupported,
                "covariant tower row " + std::to_string(tower.symbolic_rows() + 1) +
                    " is not available symbolically");
  std::vector<std::vector<Expr>> rows;
  for (int k = 0; k < k_max; ++k) rows.push_back(tower.expressions(k));
  return rows;
}

Tower::Tower(const Connection& c, const CurveSpec& curve, std::vector<Expr> base, int rows,
             const TowerOptions& options)
    : c_(c), m_(c.dimension()), rows_(rows), options_(options) {
  check_curve(c, curve);
  if (static_cast<int>(base.size()) != m_)
    throw Error(ErrorCode::InvalidArgument, "tower base dimension differs from the curve");
  if (rows < 1) throw Error(ErrorCode::InvalidArgument, "tower needs at least one row");
  require_t_only(base, "tower base");

  const auto velocity = differentiate(std::span<const Expr>(curve.components), kParameterT);
  std::vector<Expr> outputs = curve.components;
  outputs.insert(outputs.end(), velocity.begin(), velocity.end());
  std::vector<Expr> transport;
  if (c.is_symbolic()) {
    transport = symbolic_transport(c, curve, velocity);
    symbolic_transport_ = true;
    outputs.insert(outputs.end(), transport.begin(), transport.end());
  }
  exprs_.push_back(std::move(base));
  while (symbolic_transport_ && static_cast<int>(exprs_.size()) < rows_) {
    auto next = apply_derivative(transport, exprs_.back());
    if (node_count(std::span<const Expr>(next)) > options_.node_cap) break;
    exprs_.push_back(std::move(next));
  }
  for (const auto& row : exprs_) outputs.insert(outputs.end(), row.begin(), row.end());
  program_ = Program(outputs);
}

const std::vector<Expr>& Tower::expressions(int k) const {
  if (k < 0 || k >= symbolic_rows())
    throw Error(ErrorCode::Unsupported, "tower row is not symbolic");
  return exprs_[static_cast<std::size_t>(k)];
}

void Tower::evaluate_symbolic(double t, std::vector<double>& out) const {
  out.resize(program_.outputs());
  program_.evaluate(Env{t, {}}, out);
}

Vec Tower::position(double t) const {
  std::vector<double> out;
  evaluate_symbolic(t, out);
  return slice(out, 0, m_);
}

Vec Tower::velocity(double t) const {
  std::vector<double> out;
  evaluate_symbolic(t, out);
  return slice(out, static_cast<std::size_t>(m_), m_);
}

Mat Tower::transport_matrix(double t) const {
  std::vector<double> out;
  evaluate_symbolic(t, out);
  const auto m = static_cast<std::size_t>(m_);
  Mat a(m_, m_);
  if (symbolic_transport_) {
    for (int l = 0; l < m_; ++l)
      for (int nu = 0; nu < m_; ++nu) a(l, nu) = out[2 * m + static_cast<std::size_t>(l * m_ + nu)];
    return a;
  }
  const std::vector<double> x(out.begin(), out.begin() + m_);
  const auto g = c_.christoffel(x);
  a.setZero();
  for (int l = 0; l < m_; ++l)
    for (int nu = 0; nu < m_; ++nu)
      for (int mu = 0; mu < m_; ++mu) a(l, nu) += g[c_.index(l, mu, nu)] * out[m + static_cast<std::size_t>(mu)];
  return a;
}

Vec Tower::row(int k, double t) const {
  if (k < 0 || k >= rows_) throw Error(ErrorCode::InvalidArgument, "tower row out of range");
  if (k < symbolic_rows()) {
    std::vector<double> out;
    evaluate_symbolic(t, out);
    const std::size_t offset =
        static_cast<std::size_t>(m_) * (symbolic_transport_ ? 2 + static_cast<std::size_t>(m_) : 2) +
        static_cast<std::size_t>(k * m_);
    return slice(out, offset, m_);
  }
  return numeric_row(k, t);
}

Vec Tower::numeric_row(int k, double t) const {
  const double h = options_.fd_step;
  const Vec d = (-row(k - 1, t + 2 * h) + 8.0 * row(k - 1, t + h) - 8.0 * row(k - 1, t - h) +
                 row(k - 1, t - 2 * h)) /
                (12.0 * h);
  return d + transport_matrix(t) * row(k - 1, t);
}

std::vector<Vec> Tower::rows_at(double t, int count) const {
  if (count > rows_) throw Error(ErrorCode::InvalidArgument, "tower row out of range");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(row(k, t));
  return out;
}

std::string TypeSignature::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(entries[i]);
  }
  if (!complete()) {
    if (!entries.empty()) s += ",";
    s += ">" + std::to_string(k_max);
  }
  return s + ")";
}

TypeSignature type_signature(const std::vector<Vec>& columns, int m, double tol) {
  TypeSignature sig;
  sig.dimension = m;
  sig.k_max = static_cast<int>(columns.size());
  if (columns.empty()) return sig;
  const Mat all = normalized_columns(columns);
  const double scale = std::max(1.0, singular_values(all).maxCoeff());
  int rank = 0;
  for (int j = 1; j <= sig.k_max && rank < m; ++j) {
    const int r = numerical_rank(all.leftCols(j), tol, scale);
    if (r > rank) {
      rank = r;
      sig.entries.push_back(j);
    }
  }
  return sig;
}

TypeSignature nabla_type(const Connection& c, const CurveSpec& curve, double t0, int k_max,
                         double tol) {
  if (k_max <= 0) k_max = c.dimension() + 2;
  Tower tower(c, curve, differentiate(std::span<const Expr>(curve.components), kParameterT), k_max);
  return type_signature(tower.rows_at(t0, k_max), c.dimension(), tol);
}

TypeSignature frame_type(const Connection& c, const DirectedCurveSpec& d, double t0, int k_max,
                         double tol) {
  if (k_max <= 0) k_max = c.dimension() + 2;
  Tower tower(c, d.curve, d.frame, k_max);
  return type_signature(tower.rows_at(t0, k_max), c.dimension(), tol);
}

DirectedCurveSpec directed_frame(const Connection& c, const CurveSpec& curve, double t0, int k) {
  check_curve(c, curve);
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "frame order must be at least 1");
  if (k == 1) return immersed_frame(curve);
  const auto velocity = differentiate(std::span<const Expr>(curve.components), kParameterT);
  std::vector<Expr> frame;
  bool nonzero = false;
  for (const auto& v : velocity) {
    const auto p = to_polynomial(v);
    if (!p)
      throw Error(ErrorCode::Unsupported,
                  "frame division needs a polynomial curve; supply the frame explicitly");
    const Polynomial shifted = p->shifted(t0);
    const auto& a = shifted.coefficients();
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    std::vector<double> q;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (static_cast<int>(j) < k - 1) {
        if (std::abs(a[j]) > 1e-12 * std::max(1.0, scale))
          throw Error(ErrorCode::InvalidArgument,
                      "curve velocity does not vanish to order " + std::to_string(k - 1) + " at t0");
        continue;
      }
      q.push_back(a[j] / k);
    }
    if (!q.empty() && q.front() != 0.0) nonzero = true;
    frame.push_back(Polynomial(q).to_expr_about(t0));
  }
  if (!nonzero)
    throw Error(ErrorCode::InvalidArgument, "frame vanishes at t0; k exceeds the first order");
  const Expr factor = Polynomial::monomial(k - 1, static_cast<double>(k)).to_expr_about(t0);
  return make_directed(curve, std::move(frame), factor);
}

}  // namespace ntan
