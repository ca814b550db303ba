#include <string>

#include "doctest.h"
#include "ntan/error.hpp"
#include "ntan/problem.hpp"

using namespace ntan;

namespace {

// Message of the error thrown while parsing `text`, or "" when it parses.
std::string parse_message(const std::string& text, ErrorCode* code = nullptr) {
  try {
    parse_problem_file(text, "p.json");
  } catch (const Error& e) {
    if (code) *code = e.code();
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("problem: a single problem object") {
  const auto file = parse_problem_file(R"({
    "name": "quartic",
    "dimension": 3,
    "christoffel": {"3,1,2": "x1 + x2^2", "3,2,1": "x1 + x2^2"},
    "curve": ["-t^2", "t", "0"],
    "interval": [-1, 1],
    "t0": [0, 0.5],
    "grid": {"nt": 10, "ns": 20, "s_range": [-2, 2]},
    "tolerance": {"tol": 1e-9, "window": 0.5},
    "reference_surface": ["-2*t*s - t^2", "s + t", "t*s^4/3"],
    "seed": 7
  })",
                                       "q.json");
  CHECK(file.origin == "q.json");
  REQUIRE(file.problems.size() == 1);
  const auto& p = file.problems[0];
  CHECK(p.name == "quartic");
  CHECK(p.dimension == 3);
  CHECK(p.line == 1);
  CHECK_FALSE(p.has_frame);
  CHECK(p.t0 == std::vector<double>{0, 0.5});
  REQUIRE(p.grid);
  CHECK(p.grid->nt == 10);
  CHECK(p.grid->ns == 20);
  CHECK(p.grid->s_range[0] == -2);
  CHECK_FALSE(p.grid->t_range);
  CHECK(*p.tol == 1e-9);
  CHECK(*p.window == 0.5);
  CHECK(p.seed == 7);
  CHECK(p.connection.torsion_free());
  REQUIRE(p.reference_surface.size() == 3);
  CHECK(evaluate_reference(p.reference_surface[2], 0.5, 2.0) == doctest::Approx(0.5 * 16 / 3));
  CHECK(evaluate_reference(p.reference_surface[0], 0.5, 2.0) == doctest::Approx(-2.25));
}

TEST_CASE("problem: problem lists, metrics and frames") {
  const auto file = parse_problem_file(R"({
    "description": "two problems",
    "problems": [
      {"name": "a", "dimension": 2, "metric": [["1", "0"], ["0", "x1^2"]], "curve": ["1 + t", "t"], "t0": [0]},
      {"name": "b", "dimension": 3, "christoffel": {}, "curve": ["t^2", "t^3", "t^4"],
       "frame": ["2", "3*t", "4*t^2"], "factor": "t", "scan": {"n": 5}}
    ]
  })");
  REQUIRE(file.problems.size() == 2);
  CHECK(file.problems[0].connection.torsion_free());
  CHECK(file.problems[0].line == 4);
  CHECK(file.problems[1].has_frame);
  CHECK(file.problems[1].scan->n == 5);
  CHECK(file.problems[1].line == 5);
}

TEST_CASE("problem: validation errors name the file and line") {
  ErrorCode code{};
  auto msg = parse_message(R"({
  "name": "x",
  "dimension": 2,
  "christoffel": {},
  "metric": [["1", "0"], ["0", "1"]],
  "curve": ["t", "t^2"]
})",
                           &code);
  CHECK(code == ErrorCode::Validation);
  CHECK(msg.rfind("p.json:5:", 0) == 0);

  msg = parse_message(R"({"name": "x", "dimension": 2, "curve": ["t", "t^2"]})", &code);
  CHECK(code == ErrorCode::Validation);
  CHECK(msg.find("christoffel") != std::string::npos);

  msg = parse_message(R"({
  "name": "x",
  "dimension": 3,
  "christoffel": {},
  "curve": ["t", "t^2"]
})",
                      &code);
  CHECK(code == ErrorCode::Validation);
  CHECK(msg.rfind("p.json:5:", 0) == 0);

  msg = parse_message(R"({
  "name": "x",
  "dimension": 2,
  "christoffel": {},
  "curve": ["t", "t^2"],
  "colour": 3
})",
                      &code);
  CHECK(code == ErrorCode::Validation);
  CHECK(msg.rfind("p.json:6:", 0) == 0);
  CHECK(msg.find("colour") != std::string::npos);

  msg = parse_message(R"({"problems": [
  {"name": "x", "dimension": 2, "christoffel": {}, "curve": ["t", "t^2"]},
  {"name": "x", "dimension": 2, "christoffel": {}, "curve": ["t", "t^3"]}
]})",
                      &code);
  CHECK(code == ErrorCode::Validation);
  CHECK(msg.rfind("p.json:3:", 0) == 0);

  msg = parse_message(R"({"name": "x", "dimension": 2, "christoffel": {"1,1,1": "x1 +"}, "curve": ["t", "t"]})",
                      &code);
  CHECK(code == ErrorCode::Validation);
  CHECK(msg.rfind("p.json:1:", 0) == 0);

  msg = parse_message(R"({"name": "x", "dimension": 9, "christoffel": {}, "curve": ["t", "t"]})", &code);
  CHECK(code == ErrorCode::Validation);

  msg = parse_message(R"({"name": "x", "dimension": 2, "christoffel": {}, "curve": ["t", "t"], "grid": {"nt": 1}})",
                      &code);
  CHECK(code == ErrorCode::Validation);

  msg = parse_message(R"({"name": "x", )", &code);
  CHECK(code == ErrorCode::Parse);
  CHECK(msg.rfind("p.json:", 0) == 0);
}

TEST_CASE("problem: missing files") {
  try {
    load_problem_file("/nonexistent/problem.json");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}
