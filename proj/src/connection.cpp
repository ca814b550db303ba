#include "ntan/connection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "ntan/error.hpp"

namespace ntan {

struct Connection::Impl {
  int m = 0;
  bool symbolic = false;
  bool flat = false;
  bool torsion_free = false;
  std::vector<Expr> gamma;
  Program gamma_program;
  Program partial_program;
  Callback callback;
};

namespace {

void check_dimension(int m) {
  if (m < 2 || m > kMaxDimension)
    throw Error(ErrorCode::InvalidArgument,
                "dimension must be in 2.." + std::to_string(kMaxDimension) + ", got " +
                    std::to_string(m));
}

std::size_t cube(int m) {
  const auto n = static_cast<std::size_t>(m);
  return n * n * n;
}

bool symmetric_on_probes(int m, const std::vector<Expr>& gamma) {
  const auto idx = [m](int l, int a, int b) {
    return static_cast<std::size_t>((l * m + a) * m + b);
  };
  std::vector<Expr> diffs;
  for (int l = 0; l < m; ++l)
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        const Expr& p = gamma[idx(l, a, b)];
        const Expr& q = gamma[idx(l, b, a)];
        if (p.id() == q.id() || to_string(p) == to_string(q)) continue;
        diffs.push_back(p - q);
      }
  if (diffs.empty()) return true;
  const Program program(diffs);
  std::vector<double> out(diffs.size());
  for (const auto& x : probe_grid(m)) {
    try {
      program.evaluate(Env{std::nullopt, x}, out);
    } catch (const Error&) {
      continue;  // poles are outside the certified domain
    }
    for (double d : out)
      if (!(std::abs(d) <= 1e-12)) return false;
  }
  return true;
}

}  // namespace

std::vector<std::vector<double>> probe_grid(int m) {
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= 5;
  const std::size_t stride = total > 625 ? (total + 624) / 625 : 1;
  std::vector<std::vector<double>> points;
  for (std::size_t n = 0; n < total; n += stride) {
    std::vector<double> x(static_cast<std::size_t>(m));
    std::size_t r = n;
    for (int i = 0; i < m; ++i) {
      x[static_cast<std::size_t>(i)] = -1.0 + 0.5 * static_cast<double>(r % 5);
      r /= 5;
    }
    points.push_back(std::move(x));
  }
  return points;
}

Connection::Connection(int m) : Connection(symbolic(m, std::vector<Expr>(cube(m)))) {}

Connection Connection::symbolic(int m, std::vector<Expr> gamma) {
  check_dimension(m);
  if (gamma.size() != cube(m))
    throw Error(ErrorCode::InvalidArgument, "expected m^3 Christoffel symbols");
  for (const auto& e : gamma) {
    if (depends_on(e, kParameterT))
      throw Error(ErrorCode::UnknownIdentifier, "Christoffel symbols may not depend on t");
    if (max_space_index(e) > m)
      throw Error(ErrorCode::UnknownIdentifier, "Christoffel symbol uses a coordinate beyond x" +
                                                    std::to_string(m));
  }
  auto impl = std::make_shared<Impl>();
  impl->m = m;
  impl->symbolic = true;
  impl->flat = std::all_of(gamma.begin(), gamma.end(), [](const Expr& e) { return e.is_zero(); });
  std::vector<Expr> partials;
  partials.reserve(cube(m) * static_cast<std::size_t>(m));
  for (const auto& e : gamma)
    for (int k = 1; k <= m; ++k) partials.push_back(differentiate(e, k));
  impl->gamma_program = Program(gamma);
  impl->partial_program = Program(partials);
  impl->torsion_free = symmetric_on_probes(m, gamma);
  impl->gamma = std::move(gamma);
  return Connection(std::shared_ptr<const Impl>(std::move(impl)));
}

Connection Connection::from_table(int m, const std::map<std::string, std::string>& table) {
  check_dimension(m);
  std::vector<Expr> gamma(cube(m));
  ParseOptions options;
  options.dimension = m;
  options.allow_t = false;
  for (const auto& [key, text] : table) {
    std::istringstream in(key);
    int l = 0, mu = 0, nu = 0;
    char c1 = 0, c2 = 0;
    if (!(in >> l >> c1 >> mu >> c2 >> nu) || c1 != ',' || c2 != ',' || !(in >> std::ws).eof())
      throw Error(ErrorCode::Validation, "bad Christoffel index \"" + key + "\"");
    if (l < 1 || l > m || mu < 1 || mu > m || nu < 1 || nu > m)
      throw Error(ErrorCode::Validation, "Christoffel index out of range \"" + key + "\"");
    gamma[static_cast<std::size_t>(((l - 1) * m + (mu - 1)) * m + (nu - 1))] = parse(text, options);
  }
  return symbolic(m, std::move(gamma));
}

Connection Connection::from_callback(int m, Callback gamma, bool torsion_free) {
  check_dimension(m);
  auto impl = std::make_shared<Impl>();
  impl->m = m;
  impl->callback = std::move(gamma);
  impl->torsion_free = torsion_free;
  return Connection(std::shared_ptr<const Impl>(std::move(impl)));
}

int Connection::dimension() const noexcept { return impl_->m; }
bool Connection::is_symbolic() const noexcept { return impl_->symbolic; }
bool Connection::is_flat() const noexcept { return impl_->flat; }
bool Connection::torsion_free() const noexcept { return impl_->torsion_free; }

const std::vector<Expr>& Connection::symbols() const {
  if (!impl_->symbolic) throw Error(ErrorCode::Unsupported, "connection is callback-backed");
  return impl_->gamma;
}

const Expr& Connection::symbol(int l, int mu, int nu) const { return symbols().at(index(l, mu, nu)); }

void Connection::christoffel(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != impl_->m)
    throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  if (impl_->symbolic)
    impl_->gamma_program.evaluate(Env{std::nullopt, x}, out);
  else
    impl_->callback(x, out);
}

std::vector<double> Connection::christoffel(std::span<const double> x) const {
  std::vector<double> out(cube(impl_->m));
  christoffel(x, out);
  return out;
}

void Connection::christoffel_partials(std::span<const double> x, std::span<double> out) const {
  const int m = impl_->m;
  if (static_cast<int>(x.size()) != m)
    throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  if (impl_->symbolic) {
    impl_->partial_program.evaluate(Env{std::nullopt, x}, out);
    return;
  }
  constexpr double h = 1e-5;
  const std::size_t n3 = cube(m);
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> plus(n3), minus(n3);
  for (int k = 0; k < m; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    xp[kk] = x[kk] + h;
    impl_->callback(xp, plus);
    xp[kk] = x[kk] - h;
    impl_->callback(xp, minus);
    xp[kk] = x[kk];
    for (std::size_t i = 0; i < n3; ++i)
      out[i * static_cast<std::size_t>(m) + kk] = (plus[i] - minus[i]) / (2.0 * h);
  }
}

std::vector<double> Connection::christoffel_partials(std::span<const double> x) const {
  std::vector<double> out(cube(impl_->m) * static_cast<std::size_t>(impl_->m));
  christoffel_partials(x, out);
  return out;
}

double Connection::christoffel_partial(int l, int mu, int nu, int k, std::span<const double> x) const {
  const int m = impl_->m;
  if (l < 0 || l >= m || mu < 0 || mu >= m || nu < 0 || nu >= m || k < 0 || k >= m)
    throw Error(ErrorCode::InvalidArgument, "index out of range");
  return christoffel_partials(x)[index(l, mu, nu) * static_cast<std::size_t>(m) +
                                 static_cast<std::size_t>(k)];
}

std::vector<double> Connection::torsion_tensor(std::span<const double> x) const {
  const int m = impl_->m;
  const auto g = christoffel(x);
  std::vector<double> t(g.size());
  for (int l = 0; l < m; ++l)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) t[index(l, a, b)] = g[index(l, a, b)] - g[index(l, b, a)];
  return t;
}

Connection Connection::symmetrized() const {
  const int m = impl_->m;
  if (impl_->symbolic) {
    std::vector<Expr> sym(impl_->gamma.size());
    for (int l = 0; l < m; ++l)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const Expr& p = impl_->gamma[index(l, a, b)];
          const Expr& q = impl_->gamma[index(l, b, a)];
          if (p.id() == q.id()) {
            sym[index(l, a, b)] = p;
          } else if (b < a) {
            sym[index(l, a, b)] = sym[index(l, b, a)];
          } else {
            sym[index(l, a, b)] = Expr(0.5) * (p + q);
          }
        }
    return symbolic(m, std::move(sym));
  }
  auto base = impl_->callback;
  const std::size_t n3 = cube(m);
  Callback cb = [base, m, n3](std::span<const double> x, std::span<double> out) {
    std::vector<double> g(n3);
    base(x, g);
    for (int l = 0; l < m; ++l)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const auto i = static_cast<std::size_t>((l * m + a) * m + b);
          const auto j = static_cast<std::size_t>((l * m + b) * m + a);
          out[i] = 0.5 * (g[i] + g[j]);
        }
  };
  return from_callback(m, std::move(cb), true);
}

Connection levi_civita(int m, std::vector<Expr> metric) {
  check_dimension(m);
  const auto n = static_cast<std::size_t>(m);
  if (metric.size() != n * n) throw Error(ErrorCode::InvalidArgument, "expected m*m metric entries");
  for (const auto& e : metric) {
    if (depends_on(e, kParameterT))
      throw Error(ErrorCode::UnknownIdentifier, "metric may not depend on t");
    if (max_space_index(e) > m)
      throw Error(ErrorCode::UnknownIdentifier, "metric uses a coordinate beyond x" + std::to_string(m));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (to_string(metric[i * n + j]) != to_string(metric[j * n + i]))
        throw Error(ErrorCode::Validation, "metric is not symmetric");

  // Inverse by adjugate over memoized minors; fine for m <= 6.
  std::map<std::pair<unsigned, unsigned>, Expr> minors;
  const std::function<Expr(unsigned, unsigned)> minor = [&](unsigned rows, unsigned cols) -> Expr {
    if (rows == 0) return Expr(1.0);
    const auto key = std::make_pair(rows, cols);
    if (auto it = minors.find(key); it != minors.end()) return it->second;
    const int r0 = std::countr_zero(rows);
    Expr sum;
    int sign = 1;
    for (int c = 0; c < m; ++c) {
      if (!(cols & (1u << c))) continue;
      const Expr& g = metric[static_cast<std::size_t>(r0) * n + static_cast<std::size_t>(c)];
      if (!g.is_zero()) {
        const Expr term = g * minor(rows & ~(1u << r0), cols & ~(1u << c));
        sum = sign > 0 ? sum + term : sum - term;
      }
      sign = -sign;
    }
    minors.emplace(key, sum);
    return sum;
  };
  const unsigned all = (1u << m) - 1u;
  const Expr det = minor(all, all);
  if (det.is_zero()) throw Error(ErrorCode::Validation, "metric is singular");
  // adj(l, r) = (-1)^(l+r) det(rows != r, cols != l)
  std::vector<Expr> adj(n * n);
  for (int l = 0; l < m; ++l)
    for (int r = 0; r < m; ++r) {
      const Expr cof = minor(all & ~(1u << r), all & ~(1u << l));
      adj[static_cast<std::size_t>(l) * n + static_cast<std::size_t>(r)] = (l + r) % 2 ? -cof : cof;
    }
  std::vector<Expr> dg(n * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        dg[(i * n + j) * n + k] =
            j < i ? dg[(j * n + i) * n + k] : differentiate(metric[i * n + j], static_cast<int>(k) + 1);
  const Expr half_over_det = Expr(0.5) / det;
  std::vector<Expr> gamma(n * n * n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        Expr sum;
        for (std::size_t r = 0; r < n; ++r) {
          const Expr& g = adj[l * n + r];
          if (g.is_zero()) continue;
          sum = sum + g * (dg[(r * n + b) * n + a] + dg[(r * n + a) * n + b] - dg[(a * n + b) * n + r]);
        }
        const Expr entry = sum.is_zero() ? sum : half_over_det * sum;
        gamma[(l * n + a) * n + b] = entry;
        gamma[(l * n + b) * n + a] = entry;
      }
  return Connection::symbolic(m, std::move(gamma));
}

}  // namespace ntan
