#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "ntan/error.hpp"
#include "ntan/expr.hpp"

using namespace ntan;

namespace {

double eval_at(const Expr& e, double t, std::vector<double> x) {
  return evaluate(e, Env{t, std::span<const double>(x)});
}

ErrorCode parse_error_code(const std::string& text, const ParseOptions& o = {}) {
  try {
    parse(text, o);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;  // sentinel: no error
}

}  // namespace

TEST_CASE("expr: parse and evaluate follow the usual precedence") {
  CHECK(eval_at(parse("1 + 2*3"), 0, {}) == doctest::Approx(7));
  CHECK(eval_at(parse("-2^2"), 0, {}) == doctest::Approx(-4));
  CHECK(eval_at(parse("2^-1"), 0, {}) == doctest::Approx(0.5));
  CHECK(eval_at(parse("8/2/2"), 0, {}) == doctest::Approx(2));
  CHECK(eval_at(parse("x1 + x2^2"), 0, {0.5, 3.0}) == doctest::Approx(9.5));
  CHECK(eval_at(parse("t*sin(t) + cos(x1)*exp(t)"), 0.3, {1.2}) ==
        doctest::Approx(0.3 * std::sin(0.3) + std::cos(1.2) * std::exp(0.3)));
  CHECK(eval_at(parse("1.5e-3*t"), 2.0, {}) == doctest::Approx(3e-3));
  CHECK(evaluate(parse("x2 - t"), std::map<std::string, double>{{"t", 1.0}, {"x2", 4.0}}) ==
        doctest::Approx(3.0));
}

TEST_CASE("expr: to_string round-trips through parse") {
  for (const char* src : {"x1 + x2^2", "-t^3 + 2*t", "sin(t)/(1 + x3^2)", "exp(-t)*cos(2*t)", "t^-2"}) {
    const Expr a = parse(src);
    const Expr b = parse(to_string(a));
    for (double t : {0.3, 1.7})
      CHECK(eval_at(a, t, {0.2, -0.4, 0.9}) == doctest::Approx(eval_at(b, t, {0.2, -0.4, 0.9})));
  }
}

TEST_CASE("expr: syntax and identifier errors carry their codes") {
  CHECK(parse_error_code("1 +") == ErrorCode::Parse);
  CHECK(parse_error_code("(t") == ErrorCode::Parse);
  CHECK(parse_error_code("t^1.5") == ErrorCode::Parse);
  CHECK(parse_error_code("y + 1") == ErrorCode::UnknownIdentifier);
  CHECK(parse_error_code("tan(t)") == ErrorCode::UnknownIdentifier);
  ParseOptions o;
  o.dimension = 2;
  CHECK(parse_error_code("x3", o) == ErrorCode::UnknownIdentifier);
  o.allow_t = false;
  CHECK(parse_error_code("t + x1", o) == ErrorCode::UnknownIdentifier);
  CHECK(parse_error_code("x1 + x2", o) == ErrorCode::Io);
  try {
    parse("1 + * 2");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("expr: evaluation errors") {
  CHECK_THROWS_AS(eval_at(parse("1/(t - 1)"), 1.0, {}), Error);
  try {
    eval_at(parse("1/(t - 1)"), 1.0, {});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
  try {
    evaluate(parse("t + 1"), Env{std::nullopt, {}});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundVariable);
  }
  try {
    evaluate(parse("x2"), std::map<std::string, double>{{"x1", 1.0}});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundVariable);
  }
}

TEST_CASE("expr: derivatives agree with central differences") {
  const std::vector<std::string> sources = {"x1^3*x2 - sin(x1*x2)", "exp(x1 - x2^2)/(2 + cos(x1))",
                                            "t^4*x1 - 3*t*x2^2", "(x1 + t)^-2"};
  const std::vector<double> x = {0.4, -0.7};
  for (const auto& src : sources) {
    const Expr e = parse(src);
    for (int var : {0, 1, 2}) {
      const Expr d = differentiate(e, var);
      const double h = 1e-5;
      auto shifted = [&](double delta) {
        std::vector<double> y = x;
        double t = 0.6;
        if (var == 0) t += delta;
        else y[static_cast<std::size_t>(var - 1)] += delta;
        return eval_at(e, t, y);
      };
      const double fd = (shifted(h) - shifted(-h)) / (2 * h);
      CAPTURE(src);
      CAPTURE(var);
      CHECK(eval_at(d, 0.6, x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("expr: folding and substitution") {
  CHECK((Expr(2.0) * Expr(3.0)).is_constant(6.0));
  CHECK((parse("x1") * Expr(0.0)).is_zero());
  CHECK((parse("x1") + Expr(0.0)).op() == Op::Var);
  CHECK(differentiate(parse("x1^2"), 2).is_zero());
  CHECK(simplify(parse("0*x1 + 1*t")).op() == Op::Var);
  CHECK(depends_on(parse("t*x3"), 3));
  CHECK_FALSE(depends_on(parse("t*x3"), 1));
  CHECK(max_space_index(parse("x1 + x4*t")) == 4);

  const std::vector<Expr> values = {parse("t^2"), parse("2*t")};
  const Expr sub = substitute(parse("x1 + x2^2"), values);
  CHECK(max_space_index(sub) == 0);
  CHECK(eval_at(sub, 1.5, {}) == doctest::Approx(1.5 * 1.5 + 9.0));
}

TEST_CASE("expr: shared subtrees stay shared") {
  Expr e = parse("x1 + x2");
  for (int i = 0; i < 30; ++i) e = e * e + parse("x1");
  // A tree would have about 2^30 nodes; the DAG is linear.
  CHECK(node_count(e) < 200);
  const auto d = differentiate(e, 1);
  CHECK(node_count(d) < 2000);
  const std::vector<Expr> both = {e, d};
  const Program program(both);
  CHECK(program.outputs() == 2);
  CHECK(program.size() <= node_count(std::span<const Expr>(both)));
  const std::vector<double> x = {1e-3, -1e-3};
  const auto v = program.evaluate(Env{0.0, x});
  CHECK(v[0] == doctest::Approx(eval_at(e, 0.0, x)));
  CHECK(v[1] == doctest::Approx(eval_at(d, 0.0, x)));
}
