#include <cmath>
#include <vector>

#include "doctest.h"
#include "ntan/error.hpp"
#include "ntan/geodesic.hpp"
#include "ntan/random.hpp"
#include "test_util.hpp"

using namespace ntan;
using test_util::max_abs;
using test_util::vec;

namespace {

Connection worked_connection() {
  return Connection::from_table(3, {{"3,1,2", "x1 + x2^2"}, {"3,2,1", "x1 + x2^2"}});
}

// -Gamma^l_{mu nu} v^mu v^nu
Vec minus_gamma_vv(const Connection& c, const Vec& x, const Vec& v) {
  const int m = c.dimension();
  const auto g = c.christoffel(std::vector<double>(x.data(), x.data() + m));
  Vec out = Vec::Zero(m);
  for (int l = 0; l < m; ++l)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) out(l) -= g[c.index(l, a, b)] * v(a) * v(b);
  return out;
}

}  // namespace

TEST_CASE("geodesic: flat geodesics are straight lines") {
  const Vec x = vec({0.1, 0.2, -0.3}), v = vec({1.0, -2.0, 0.5});
  for (double s : {-1.0, 0.0, 0.37, 2.0}) {
    const auto st = integrate_geodesic(Connection(3), x, v, s);
    CHECK(max_abs(st.position - (x + s * v)) < 1e-13);
    CHECK(max_abs(st.velocity - v) < 1e-13);
  }
}

TEST_CASE("geodesic: tangent geodesics of the torsion-free quartic example") {
  // From (gamma(t), gamma'(t)) with gamma = (-t^2, t, 0): (-2ts - t^2, s + t, t s^4 / 3).
  const auto c = worked_connection();
  for (double t : {-0.9, -0.2, 0.5, 1.0})
    for (double s : {-1.0, -0.3, 0.6, 1.0}) {
      const auto st = integrate_geodesic(c, vec({-t * t, t, 0.0}), vec({-2 * t, 1.0, 0.0}), s);
      CHECK(max_abs(st.position - vec({-2 * t * s - t * t, s + t, t * std::pow(s, 4) / 3})) < 1e-9);
      CHECK(max_abs(st.velocity - vec({-2 * t, 1.0, 4 * t * std::pow(s, 3) / 3})) < 1e-8);
    }
}

TEST_CASE("geodesic: polar coordinates trace Cartesian lines") {
  const auto c = levi_civita(2, {Expr(1.0), Expr(0.0), Expr(0.0), parse("x1^2")});
  // Start at (r, theta) = (1, 0) moving with dtheta/ds = 1: the line (1, s).
  for (double s : {0.5, 1.0, 3.0}) {
    const auto st = integrate_geodesic(c, vec({1.0, 0.0}), vec({0.0, 1.0}), s);
    CHECK(st.position(0) == doctest::Approx(std::sqrt(1 + s * s)).epsilon(1e-9));
    CHECK(st.position(1) == doctest::Approx(std::atan(s)).epsilon(1e-9));
  }
}

TEST_CASE("geodesic: variation matches differences of perturbed geodesics") {
  SplitMix64 rng(5);
  const auto c = random_connection(rng, 3, false);
  const Vec x = vec({0.1, -0.3, 0.2}), v = vec({0.8, 0.4, -0.5});
  const Vec dx = vec({0.3, 0.1, -0.2}), dv = vec({-0.4, 0.7, 0.2});
  const double s = 0.8, h = 1e-5;
  GeodesicOptions o;
  o.tolerance = 1e-12;
  const auto var = integrate_geodesic_variation(c, x, v, dx, dv, s, o);
  const auto plus = integrate_geodesic(c, x + h * dx, v + h * dv, s, o);
  const auto minus = integrate_geodesic(c, x - h * dx, v - h * dv, s, o);
  CHECK(max_abs(var.state.position - integrate_geodesic(c, x, v, s, o).position) < 1e-12);
  CHECK(max_abs(var.dposition - (plus.position - minus.position) / (2 * h)) < 1e-7);
  CHECK(max_abs(var.dvelocity - (plus.velocity - minus.velocity) / (2 * h)) < 1e-7);
}

TEST_CASE("geodesic: jet coefficients") {
  SplitMix64 rng(9);
  const auto c = random_connection(rng, 3, true);
  const Vec x = vec({0.2, 0.1, -0.4}), v = vec({0.5, -1.0, 0.3});
  const auto jet = jet_coefficients(c, x, v);
  CHECK(max_abs(jet.h0 - minus_gamma_vv(c, x, v)) < 1e-14);

  const double h = 1e-5;
  for (int k = 0; k < 3; ++k) {
    Vec e = Vec::Zero(3);
    e(k) = h;
    const Vec dx = (minus_gamma_vv(c, x + e, v) - minus_gamma_vv(c, x - e, v)) / (2 * h);
    const Vec dv = (minus_gamma_vv(c, x, v + e) - minus_gamma_vv(c, x, v - e)) / (2 * h);
    CHECK(max_abs(jet.dh_dx.col(k) - dx) < 1e-8);
    CHECK(max_abs(jet.dh_dv.col(k) - dv) < 1e-8);
  }

  // phi''' (0) = 3 dh_ds, from the integrator by a central difference of phi''.
  GeodesicOptions o;
  o.tolerance = 1e-13;
  const double ds = 1e-2;
  auto accel = [&](double s) {
    const auto st = integrate_geodesic(c, x, v, s, o);
    const auto g = minus_gamma_vv(c, st.position, st.velocity);
    return g;
  };
  const Vec third = test_util::central_diff(accel, 0.0, ds);
  CHECK(max_abs(third / 3 - jet.dh_ds) < 1e-6);
}

TEST_CASE("geodesic: series approximation error is fourth order") {
  SplitMix64 rng(13);
  const auto c = random_connection(rng, 3, true);
  const Vec x = vec({0.1, 0.2, 0.3}), v = vec({1.0, 0.5, -0.5});
  const auto jet = jet_coefficients(c, x, v);
  GeodesicOptions o;
  o.tolerance = 1e-13;
  auto err = [&](double s) { return (integrate_geodesic(c, x, v, s, o).position - series_approx(jet, x, v, s)).norm(); };
  const double slope = std::log(err(0.1) / err(0.05)) / std::log(2.0);
  CHECK(slope > 3.7);
  CHECK(slope < 4.3);
}

TEST_CASE("geodesic: escape is reported") {
  // x'' = x'^2 blows up at s = 1 / v.
  const auto c = Connection::from_table(2, {{"1,1,1", "-1"}});
  try {
    integrate_geodesic(c, vec({0.0, 0.0}), vec({10.0, 0.0}), 1.0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GeodesicEscape);
  }
}
