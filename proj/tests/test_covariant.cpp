#include <cmath>
#include <vector>

#include "doctest.h"
#include "ntan/covariant.hpp"
#include "ntan/error.hpp"
#include "ntan/random.hpp"
#include "test_util.hpp"

using namespace ntan;
using test_util::central_diff;
using test_util::max_abs;
using test_util::vec;

namespace {

struct Jet {
  Vec x, d1, d2, d3;
};

Jet jet_fd(const CurveSpec& curve, double t) {
  auto f = [&](double s) { return evaluate_curve(curve.components, s); };
  auto f1 = [&](double s) { return central_diff(f, s, 1e-3); };
  auto f2 = [&](double s) { return central_diff(f1, s, 1e-3); };
  return {f(t), f1(t), f2(t), central_diff(f2, t, 1e-3)};
}

std::vector<double> as_std(const Vec& x) { return {x.data(), x.data() + x.size()}; }

// nabla^2 gamma and nabla^3 gamma written out from the definition.
std::pair<Vec, Vec> second_third(const Connection& c, const Jet& j) {
  const int m = c.dimension();
  const auto g = c.christoffel(as_std(j.x));
  const auto dg = c.christoffel_partials(as_std(j.x));
  auto G = [&](int l, int a, int b) { return g[c.index(l, a, b)]; };
  auto dG = [&](int l, int a, int b, int k) { return dg[c.index(l, a, b) * static_cast<std::size_t>(m) + k]; };
  Vec n2 = j.d2;
  for (int l = 0; l < m; ++l)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) n2(l) += G(l, a, b) * j.d1(a) * j.d1(b);
  Vec n3 = j.d3;
  for (int l = 0; l < m; ++l)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        n3(l) += G(l, a, b) * (j.d2(a) * j.d1(b) + j.d1(a) * j.d2(b)) + G(l, a, b) * j.d1(a) * n2(b);
        for (int k = 0; k < m; ++k) n3(l) += dG(l, a, b, k) * j.d1(k) * j.d1(a) * j.d1(b);
      }
  return {n2, n3};
}

}  // namespace

TEST_CASE("covariant: tower rows of the torsionless quartic example") {
  const auto c = Connection::from_table(3, {{"3,1,2", "x1 + x2^2"}, {"3,2,1", "x1 + x2^2"}});
  const auto curve = parse_curve({"-t^2", "t", "0"});
  const auto rows = curve_tower(c, curve, 3);
  REQUIRE(rows.size() == 3);
  const Tower tower(c, curve, rows[0], 3);
  for (double t : {-1.0, -0.3, 0.0, 0.8}) {
    CHECK(max_abs(tower.row(0, t) - vec({-2 * t, 1, 0})) < 1e-12);
    CHECK(max_abs(tower.row(1, t) - vec({-2, 0, 0})) < 1e-12);
    CHECK(max_abs(tower.row(2, t) - vec({0, 0, 0})) < 1e-12);
  }
}

TEST_CASE("covariant: derivative along a curve matches its definition") {
  SplitMix64 rng(21);
  const auto c = random_connection(rng, 3, false);
  const auto curve = random_curve(rng, 3, 4);
  const std::vector<Expr> v = {parse("t^2 - 1"), parse("sin(t)"), parse("3*t")};
  const auto nv = covariant_derive_along(c, curve, v);
  const double t = 0.35;
  const Jet j = jet_fd(curve, t);
  const auto g = c.christoffel(as_std(j.x));
  const Vec vt = vec({t * t - 1, std::sin(t), 3 * t});
  Vec want = vec({2 * t, std::cos(t), 3.0});
  for (int l = 0; l < 3; ++l)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) want(l) += g[c.index(l, a, b)] * j.d1(a) * vt(b);
  CHECK(max_abs(evaluate_curve(nv, t) - want) < 1e-8);
}

TEST_CASE("covariant: tower agrees with the written-out second and third derivatives") {
  for (int i = 0; i < 5; ++i) {
    auto rng = SplitMix64::stream(100, static_cast<std::uint64_t>(i));
    const auto c = random_connection(rng, 3, i % 2 == 0);
    const auto curve = random_curve(rng, 3, 4);
    const double t = rng.uniform(-0.5, 0.5);
    const auto rows = curve_tower(c, curve, 3);
    const Tower tower(c, curve, rows[0], 3);
    const auto [n2, n3] = second_third(c, jet_fd(curve, t));
    CHECK(max_abs(tower.row(1, t) - n2) < 1e-7);
    CHECK(max_abs(tower.row(2, t) - n3) < 1e-6);
  }
}

TEST_CASE("covariant: numeric rows past the node cap follow the symbolic ones") {
  SplitMix64 rng(31);
  const auto c = random_connection(rng, 3, true);
  const auto curve = random_curve(rng, 3, 4);
  const auto base = differentiate(std::span<const Expr>(curve.components), kParameterT);
  const Tower symbolic(c, curve, base, 4);
  TowerOptions o;
  o.node_cap = 1;
  const Tower numeric(c, curve, base, 4, o);
  CHECK(numeric.symbolic_rows() < symbolic.symbolic_rows());
  for (double t : {-0.4, 0.1, 0.6})
    for (int k = 0; k < 3; ++k) {
      const Vec a = symbolic.row(k, t), b = numeric.row(k, t);
      CHECK(max_abs(a - b) < 1e-5 * std::max(1.0, max_abs(a)));
    }
  CHECK(max_abs(symbolic.velocity(0.2) - evaluate_curve(base, 0.2)) < 1e-12);
  CHECK(max_abs(symbolic.position(0.2) - evaluate_curve(curve.components, 0.2)) < 1e-12);
}

TEST_CASE("covariant: transport matrix") {
  SplitMix64 rng(41);
  const auto c = random_connection(rng, 3, false);
  const auto curve = random_curve(rng, 3, 3);
  const auto base = differentiate(std::span<const Expr>(curve.components), kParameterT);
  const Tower tower(c, curve, base, 2);
  const double t = -0.25;
  const Vec x = evaluate_curve(curve.components, t), d1 = evaluate_curve(base, t);
  const auto g = c.christoffel(as_std(x));
  const Mat A = tower.transport_matrix(t);
  for (int l = 0; l < 3; ++l)
    for (int n = 0; n < 3; ++n) {
      double want = 0.0;
      for (int mu = 0; mu < 3; ++mu) want += g[c.index(l, mu, n)] * d1(mu);
      CHECK(A(l, n) == doctest::Approx(want));
    }
}

TEST_CASE("covariant: type signatures") {
  const std::vector<Vec> cols = {vec({1, 0, 0}), vec({0, 1, 0}), vec({1, 1, 0}), vec({0, 0, 1})};
  const auto s = type_signature(cols, 3, 1e-8);
  CHECK(s.entries == std::vector<int>{1, 2, 4});
  CHECK(s.complete());
  CHECK(s.to_string() == "(1,2,4)");
  const std::vector<Vec> short_cols = {vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0})};
  const auto t = type_signature(short_cols, 3, 1e-8);
  CHECK_FALSE(t.complete());
  CHECK(t.to_string() == "(2,3,>3)");

  const Connection flat(3);
  CHECK(nabla_type(flat, parse_curve({"t", "t^2", "t^3"}), 0.0).to_string() == "(1,2,3)");
  CHECK(nabla_type(flat, parse_curve({"t", "t^2", "t^4"}), 0.0).to_string() == "(1,2,4)");
  CHECK(nabla_type(flat, parse_curve({"t^2", "t^3", "t^4"}), 0.0).to_string() == "(2,3,4)");
  CHECK(nabla_type(flat, parse_curve({"t", "t^2", "t^4"}), 0.5).to_string() == "(1,2,3)");
  CHECK(nabla_type(flat, parse_curve({"t", "t^2", "0"}), 0.0).to_string() == "(1,2,>5)");
  CHECK(nabla_type(Connection(4), parse_curve({"t^2", "t^3", "t^4", "t^5"}), 0.0).to_string() == "(2,3,4,5)");
}

TEST_CASE("covariant: directed curves") {
  const Connection flat(3);
  const auto curve = parse_curve({"t^2", "t^3", "t^4"});
  const auto d = directed_frame(flat, curve, 0.0, 2);
  for (double t : {-0.5, 0.0, 0.7}) {
    CHECK(max_abs(evaluate_curve(d.frame, t) - vec({1, 1.5 * t, 2 * t * t})) < 1e-12);
    CHECK(evaluate(d.factor, Env{t, {}}) == doctest::Approx(2 * t));
  }
  CHECK(frame_type(flat, d, 0.0).to_string() == "(1,2,3)");
  CHECK_THROWS_AS(directed_frame(flat, parse_curve({"t", "t^2", "t^3"}), 0.0, 2), Error);

  const auto imm = immersed_frame(parse_curve({"t", "t^2", "t^3"}));
  CHECK(imm.factor.is_constant(1.0));

  // c u must equal gamma'.
  CHECK_THROWS_AS(make_directed(parse_curve({"t", "t^2", "t^3"}), {parse("1"), parse("t"), parse("t^2")},
                                parse("1")),
                  Error);
  CHECK_THROWS_AS(parse_curve({"t", "x1"}), Error);
}
