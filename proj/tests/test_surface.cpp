#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ntan/random.hpp"
#include "ntan/surface.hpp"
#include "test_util.hpp"

using namespace ntan;
using test_util::central_diff;
using test_util::max_abs;
using test_util::vec;

namespace {

int count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

TEST_CASE("surface: flat tangent surface is gamma + s gamma'") {
  const TangentSurface f(Connection(3), parse_curve({"t", "t^2", "t^3"}));
  for (double t : {-0.5, 0.2})
    for (double s : {-1.0, 0.0, 0.4}) {
      const Vec want = vec({t + s, t * t + 2 * t * s, t * t * t + 3 * t * t * s});
      CHECK(max_abs(f.evaluate(t, s) - want) < 1e-12);
    }
}

TEST_CASE("surface: torsionless quartic example has a closed form") {
  const auto c = Connection::from_table(3, {{"3,1,2", "x1 + x2^2"}, {"3,2,1", "x1 + x2^2"}});
  const TangentSurface f(c, parse_curve({"-t^2", "t", "0"}));
  for (double t : {-1.0, -0.4, 0.3, 1.0})
    for (double s : {-1.0, -0.1, 0.6, 1.0})
      CHECK(max_abs(f.evaluate(t, s) - vec({-2 * t * s - t * t, s + t, t * std::pow(s, 4) / 3})) < 1e-9);
}

TEST_CASE("surface: partials and the frontal frame") {
  SplitMix64 rng(17);
  const auto c = random_connection(rng, 3, true);
  const auto curve = random_curve(rng, 3, 4);
  GeodesicOptions o;
  o.tolerance = 1e-12;
  const TangentSurface f(c, curve, o);
  const double t = 0.2, s = 0.3;
  const auto p = f.partials(t, s);
  CHECK(max_abs(p.f - f.evaluate(t, s)) < 1e-12);
  const Vec ft = central_diff([&](double x) { return f.evaluate(x, s); }, t, 1e-3);
  const Vec fs = central_diff([&](double x) { return f.evaluate(t, x); }, s, 1e-3);
  CHECK(max_abs(p.df_dt - ft) < 1e-7);
  CHECK(max_abs(p.df_ds - fs) < 1e-7);

  // Immersed frame: c = 1, F = (f_t - f_s) / s.
  CHECK(max_abs(f.frame_F(t, s) - (p.df_dt - p.df_ds) / s) < 1e-9);
  // F is continuous through s = 0, where it equals nabla u.
  const Vec at0 = f.frame_F(t, 0.0);
  CHECK(max_abs(at0 - f.frame_tower().row(1, t)) < 1e-12);
  CHECK(max_abs(f.frame_F(t, 5e-4) - at0) < 1e-2 * std::max(1.0, max_abs(at0)));
  CHECK(max_abs(f.frame_F(t, 2e-3) - f.frame_F(t, 5e-4)) < 1e-2 * std::max(1.0, max_abs(at0)));
}

TEST_CASE("surface: the s-function of the immersed frame is -s") {
  SplitMix64 rng(19);
  const auto c = random_connection(rng, 3, true);
  const TangentSurface f(c, random_curve(rng, 3, 4));
  for (double s : {-0.5, -0.1, 0.05, 0.4}) CHECK(f.s_function(0.1, s) == doctest::Approx(-s).epsilon(1e-6));
  const TangentSurface flat(Connection(3), parse_curve({"t", "t^2", "t^3"}));
  CHECK(flat.s_function(0.3, 0.7) == doctest::Approx(-0.7).epsilon(1e-9));
}

TEST_CASE("surface: bivector pairing") {
  const Vec a = vec({1, 0, 0}), b = vec({0, 1, 0}), c = vec({1, 1, 0}), d = vec({0, 2, 1});
  CHECK(bivector_dot(a, b, a, b) == doctest::Approx(1.0));
  CHECK(bivector_dot(a, b, b, a) == doctest::Approx(-1.0));
  CHECK(bivector_dot(a, b, c, d) == doctest::Approx(1 * 2 - 0 * 1));
}

TEST_CASE("surface: flat cuspidal edge mesh") {
  const TangentSurface f(Connection(3), parse_curve({"t", "t^2", "t^3"}));
  const auto mesh = build_mesh(f, {-1, 1}, {-1, 1}, 50, 50);
  CHECK(mesh.vertices.size() == 2500);
  CHECK(mesh.holes() == 0);
  CHECK(mesh.quads.size() == 49 * 49);
  CHECK(mesh.index(3, 7) == 3 * 50 + 7);
  // The only sign change of sigma is across s = 0.
  for (int i = 0; i < mesh.nt; ++i)
    for (int j = 0; j + 1 < mesh.ns; ++j) {
      const double a = mesh.sigma[static_cast<std::size_t>(mesh.index(i, j))];
      const double b = mesh.sigma[static_cast<std::size_t>(mesh.index(i, j + 1))];
      if (a * b < 0) CHECK(mesh.s[static_cast<std::size_t>(j)] * mesh.s[static_cast<std::size_t>(j + 1)] < 0);
    }
  std::ostringstream obj, csv;
  write_obj(mesh, obj);
  write_csv(mesh, csv);
  CHECK(count_prefix(obj.str(), "v ") == 2500);
  CHECK(count_prefix(obj.str(), "f ") == 49 * 49);
  CHECK(count_prefix(csv.str(), "t,s,x1,x2,x3,sigma") == 1);
  CHECK(count_prefix(csv.str(), "") == 2501);
}

TEST_CASE("surface: escaping geodesics leave holes") {
  // x1'' = x1'^2 escapes at s = 1 when x1' = 1.
  const auto c = Connection::from_table(3, {{"1,1,1", "-1"}});
  const TangentSurface f(c, parse_curve({"t", "t^2", "t^3"}));
  const auto mesh = build_mesh(f, {-0.5, 0.5}, {0, 2}, 5, 21);
  CHECK(mesh.holes() > 0);
  CHECK(mesh.holes() < 5 * 21);
  for (const auto& q : mesh.quads)
    for (int v : q) CHECK(mesh.valid[static_cast<std::size_t>(v)]);
  std::ostringstream obj;
  write_obj(mesh, obj);
  CHECK(count_prefix(obj.str(), "v ") == 5 * 21 - mesh.holes());
  CHECK(count_prefix(obj.str(), "f ") == static_cast<int>(mesh.quads.size()));
  // Face indices refer to written vertices only.
  std::istringstream in(obj.str());
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("f ", 0) == 0) {
      std::istringstream f(line.substr(2));
      int v = 0;
      while (f >> v) CHECK((v >= 1 && v <= 5 * 21 - mesh.holes()));
    }
}
