#include "ntan/oracles.hpp"

namespace ntan::oracles {

namespace {

struct Symbols {
  int m;
  std::vector<double> g;
  std::vector<double> dg;
  std::size_t at(int l, int a, int b) const {
    return static_cast<std::size_t>((l * m + a) * m + b);
  }
  double G(int l, int a, int b) const { return g[at(l, a, b)]; }
  double dG(int l, int a, int b, int k) const {
    return dg[at(l, a, b) * static_cast<std::size_t>(m) + static_cast<std::size_t>(k)];
  }
};

Symbols symbols_at(const Connection& c, const Vec& x) {
  const std::vector<double> p(x.data(), x.data() + x.size());
  return Symbols{c.dimension(), c.christoffel(p), c.christoffel_partials(p)};
}

}  // namespace

Vec second_covariant(const Connection& c, const CurveJet& g) {
  const auto S = symbols_at(c, g.x);
  const int m = S.m;
  Vec r = g.d2;
  for (int l = 0; l < m; ++l)
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) r(l) += S.G(l, mu, nu) * g.d1(mu) * g.d1(nu);
  return r;
}

Vec third_covariant(const Connection& c, const CurveJet& g) {
  const auto S = symbols_at(c, g.x);
  const int m = S.m;
  Vec r = g.d3;
  for (int l = 0; l < m; ++l)
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) {
        r(l) += (2.0 * S.G(l, mu, nu) + S.G(l, nu, mu)) * g.d1(mu) * g.d2(nu);
        for (int k = 0; k < m; ++k) {
          double coeff = S.dG(l, mu, nu, k);
          for (int rho = 0; rho < m; ++rho) coeff += S.G(l, k, rho) * S.G(rho, mu, nu);
          r(l) += coeff * g.d1(mu) * g.d1(nu) * g.d1(k);
        }
      }
  return r;
}

Vec characteristic_field_immersed(const Connection& c, const CurveJet& g) {
  const auto S = symbols_at(c, g.x);
  const int m = S.m;
  Vec r = g.d3;
  for (int l = 0; l < m; ++l)
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) {
        r(l) += 1.5 * (S.G(l, mu, nu) + S.G(l, nu, mu)) * g.d1(mu) * g.d2(nu);
        for (int k = 0; k < m; ++k) {
          double coeff = S.dG(l, mu, nu, k);
          for (int rho = 0; rho < m; ++rho)
            coeff += 0.5 * S.G(l, rho, mu) * S.G(rho, nu, k) + 0.5 * S.G(l, mu, rho) * S.G(rho, nu, k);
          r(l) += coeff * g.d1(mu) * g.d1(nu) * g.d1(k);
        }
      }
  return r;
}

Vec characteristic_field_directed(const Connection& c, const Vec& x, const Vec& u, const Vec& du,
                                  const Vec& ddu, double factor, double factor_dt) {
  const auto S = symbols_at(c, x);
  const int m = S.m;
  Vec r = ddu;
  for (int l = 0; l < m; ++l)
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) {
        r(l) += factor_dt * S.G(l, mu, nu) * u(mu) * u(nu);
        r(l) += 1.5 * factor * (S.G(l, mu, nu) + S.G(l, nu, mu)) * u(nu) * du(mu);
        for (int k = 0; k < m; ++k) {
          double coeff = 2.0 * S.dG(l, mu, nu, k);
          for (int rho = 0; rho < m; ++rho)
            coeff += S.G(l, rho, mu) * S.G(rho, k, nu) + S.G(l, mu, rho) * S.G(rho, k, nu);
          r(l) += 0.5 * factor * factor * coeff * u(mu) * u(nu) * u(k);
        }
      }
  return r;
}

}  // namespace ntan::oracles
