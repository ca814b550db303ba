#pragma once

// Problem files: JSON describing a connection, a (possibly directed) curve and
// what to run on it.  A file holds one problem object or {"problems": [...]}.
//
//   {
//     "name": "example",
//     "dimension": 3,
//     "christoffel": {"3,1,2": "x1 + x2^2", "3,2,1": "x1 + x2^2"},   // or
//     "metric": [["1", "0", "0"], ...],                               // m x m
//     "curve": ["-t^2", "t", "0"],
//     "frame": [...], "factor": "...",       // optional, both or neither
//     "interval": [-1, 1],
//     "t0": [0, 0.5],
//     "scan": {"n": 21},
//     "grid": {"nt": 50, "ns": 50, "s_range": [-1, 1], "t_range": [-1, 1]},
//     "tolerance": {"tol": 1e-8, "window": 1.0},
//     "reference_surface": ["-2*t*s - t^2", "s + t", "t*s^4/3"],
//     "seed": 1
//   }
//
// Validation errors name the file and line of the offending entry.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ntan/connection.hpp"
#include "ntan/covariant.hpp"

namespace ntan {

struct ScanParams {
  int n = 21;
};

struct GridParams {
  int nt = 50;
  int ns = 50;
  std::optional<std::array<double, 2>> t_range;  // defaults to the interval
  std::array<double, 2> s_range{-1.0, 1.0};
};

struct Problem {
  std::string name;
  int dimension = 0;
  int line = 0;
  Connection connection{2};
  DirectedCurveSpec directed;
  bool has_frame = false;
  std::vector<double> t0;
  std::optional<ScanParams> scan;
  std::optional<GridParams> grid;
  std::optional<double> tol;
  std::optional<double> window;
  std::uint64_t seed = 0;
  // Closed form f(t, s) to compare meshes against; expressions in t and s.
  std::vector<Expr> reference_surface;

  const CurveSpec& curve() const noexcept { return directed.curve; }
};

struct ProblemFile {
  std::string origin;
  std::vector<Problem> problems;
};

ProblemFile parse_problem_file(std::string_view text, const std::string& origin = "<input>");
ProblemFile load_problem_file(const std::string& path);

// Reference surfaces are parsed with s renamed to x1; evaluate with this.
double evaluate_reference(const Expr& e, double t, double s);

}  // namespace ntan
