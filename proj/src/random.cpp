#include "ntan/random.hpp"

#include <functional>

namespace ntan {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform(double a, double b) {
  return a + (b - a) * static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return SplitMix64(mix.next());
}

Polynomial random_polynomial(SplitMix64& rng, int degree, double amplitude) {
  std::vector<double> c(static_cast<std::size_t>(degree + 1));
  for (auto& x : c) x = rng.uniform(-amplitude, amplitude);
  return Polynomial(std::move(c));
}

CurveSpec random_curve(SplitMix64& rng, int m, int degree) {
  std::vector<Expr> comps;
  for (int i = 0; i < m; ++i) comps.push_back(random_polynomial(rng, degree).to_expr());
  return make_curve(std::move(comps), -1.0, 1.0);
}

namespace {

// Exponent vectors of total degree <= d in m variables, graded order.
std::vector<std::vector<int>> monomials(int m, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(m), 0);
  for (int total = 0; total <= d; ++total) {
    std::function<void(int, int)> fill = [&](int var, int left) {
      if (var == m - 1) {
        e[static_cast<std::size_t>(var)] = left;
        out.push_back(e);
        return;
      }
      for (int k = left; k >= 0; --k) {
        e[static_cast<std::size_t>(var)] = k;
        fill(var + 1, left - k);
      }
    };
    fill(0, total);
  }
  return out;
}

Expr random_field(SplitMix64& rng, const std::vector<std::vector<int>>& basis, double amplitude) {
  Expr sum;
  for (const auto& e : basis) {
    Expr term(rng.uniform(-amplitude, amplitude));
    for (std::size_t k = 0; k < e.size(); ++k)
      if (e[k] > 0) term = term * pow(Expr::variable(static_cast<int>(k) + 1), e[k]);
    sum = sum + term;
  }
  return sum;
}

}  // namespace

Connection random_connection(SplitMix64& rng, int m, bool torsion_free, int degree, double amplitude) {
  const auto basis = monomials(m, degree);
  const auto n = static_cast<std::size_t>(m);
  std::vector<Expr> g(n * n * n);
  for (int l = 0; l < m; ++l)
    for (int a = 0; a < m; ++a)
      for (int b = torsion_free ? a : 0; b < m; ++b) {
        const Expr e = random_field(rng, basis, amplitude);
        g[(static_cast<std::size_t>(l) * n + static_cast<std::size_t>(a)) * n + static_cast<std::size_t>(b)] = e;
        if (torsion_free)
          g[(static_cast<std::size_t>(l) * n + static_cast<std::size_t>(b)) * n + static_cast<std::size_t>(a)] = e;
      }
  return Connection::symbolic(m, std::move(g));
}

}  // namespace ntan
