#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "ntan/error.hpp"
#include "ntan/harness.hpp"

using namespace ntan;
using nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(NTAN_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("harness: classify the flat normal forms") {
  const auto report = run_classify(load_problem_file(data("flat-normal-forms.json")));
  REQUIRE(report.records.size() == 4);
  CHECK(report.exit_code() == kExitOk);
  const std::vector<SingularityKind> want = {SingularityKind::CuspidalEdge, SingularityKind::FoldedUmbrella,
                                             SingularityKind::Swallowtail, SingularityKind::OpenSwallowtail};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(report.records[i].cls.kind == want[i]);
    CHECK(report.records[i].psi.kind == want[i]);
    CHECK_FALSE(report.records[i].margin_sensitive);
  }
  const auto j = json::parse(to_json(report));
  CHECK(j["schema"] == 1);
  CHECK(j["command"] == "classify");
  CHECK(j["records"].size() == 4);
  CHECK(j["records"][0]["tolerances"]["tol"] == 1e-8);
  CHECK(j["unresolved"] == false);
  const auto csv = to_csv(report);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("harness: the torsionless quartic problem is degenerate at every probe") {
  const auto report = run_classify(load_problem_file(data("torsionless-degenerate.json")));
  REQUIRE(report.records.size() == 5);
  for (const auto& r : report.records) {
    CHECK(r.cls.kind == SingularityKind::DegeneratePsiZero);
    REQUIRE(r.cls.diagnostics);
    CHECK_FALSE(r.cls.diagnostics->fold_like);
  }
}

TEST_CASE("harness: scan and unresolved exit code") {
  const auto scan = run_scan(load_problem_file(data("folded-umbrella-scan.json")));
  int umbrellas = 0;
  for (const auto& r : scan.records)
    if (r.cls.kind == SingularityKind::FoldedUmbrella) {
      ++umbrellas;
      CHECK(r.t0 == doctest::Approx(0.25).epsilon(1e-9));
    }
  CHECK(umbrellas == 1);

  const auto band = run_classify(parse_problem_file(
      R"({"name": "b", "dimension": 3, "christoffel": {}, "curve": ["t", "t^2", "1e-8*t^3"], "t0": [0]})"));
  CHECK(band.any_unresolved());
  CHECK(band.exit_code() == kExitUnresolved);

  CHECK_THROWS_AS(run_classify(parse_problem_file(
                      R"({"name": "n", "dimension": 3, "christoffel": {}, "curve": ["t", "t^2", "t^3"]})")),
                  Error);
}

TEST_CASE("harness: meshes are written with hole counts and reference deviation") {
  const auto dir = std::filesystem::temp_directory_path() / "ntan-harness-mesh";
  std::filesystem::remove_all(dir);
  RunOptions o;
  o.threads = 2;
  const auto reports = run_mesh(load_problem_file(data("flat-normal-forms.json")), dir.string(), "csv", o);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].vertices == 2500);
  CHECK(reports[0].holes == 0);
  CHECK(reports[0].off_curve_rows == 0);
  CHECK(std::filesystem::exists(dir / "cuspidal-edge.obj"));
  CHECK(std::filesystem::exists(dir / "cuspidal-edge.csv"));

  const auto quartic = run_mesh(load_problem_file(data("torsionless-degenerate.json")), dir.string());
  REQUIRE(quartic.size() == 1);
  REQUIRE(quartic[0].reference_deviation);
  CHECK(*quartic[0].reference_deviation <= 1e-6);
  const auto j = json::parse(to_json(quartic));
  CHECK(j["meshes"][0]["vertices"] == 10000);
  std::filesystem::remove_all(dir);
}

TEST_CASE("harness: trial reports do not depend on the thread count") {
  TrialOptions o;
  o.curves = 40;
  o.points = 3;
  o.threads = 1;
  const auto a = genericity_trial(o);
  o.threads = 4;
  const auto b = genericity_trial(o);
  CHECK(to_json(a) == to_json(b));
  CHECK(a.samples == 120);
  int total = 0;
  for (const auto& [type, n] : a.counts) total += n;
  CHECK(total == a.samples);
  CHECK(a.leading_type == "(1,2,3)");

  o.seed = 43;
  CHECK(to_json(genericity_trial(o)) != to_json(b));
}

TEST_CASE("harness: directed trial follows the shift rule") {
  TrialOptions o;
  o.curves = 30;
  o.ell = 1;
  const auto r = directed_genericity_trial(o);
  CHECK(r.directed);
  CHECK(r.shift_checked > 0);
  CHECK(r.shift_matched == r.shift_checked);
  CHECK(r.counts.at("(2,3,4)") == r.resolved);
  REQUIRE(r.constructed);
  CHECK(r.constructed->frame_type == "(1,2,4)");
  CHECK(r.constructed->gamma_type == "(2,3,5)");
  CHECK(r.constructed->matches);
}

TEST_CASE("harness: bundled self-check") {
  const auto r = verify();
  CHECK(r.passed());
  CHECK(r.checks.size() == 4);
  const auto j = json::parse(to_json(r));
  CHECK(j["schema"] == 1);
}
