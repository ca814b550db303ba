// Command line front end over the C interface.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ntan/ntan.h"

namespace {

struct Common {
  double tol = 0.0;
  std::string out;
  std::string format = "json";
  unsigned threads = 0;
  bool no_margin = false;
};

int report_error(ntan_status status) {
  std::cerr << "error (" << ntan_status_name(status) << "): " << ntan_last_error() << "\n";
  return 1;
}

// Prints the report, or writes it to <out>/<name>.<format> when --out is set.
int deliver(const Common& common, const std::string& name, char* report, int exit_code) {
  const std::string text = report;
  ntan_string_free(report);
  if (common.out.empty()) {
    std::cout << text;
    return exit_code;
  }
  std::error_code ec;
  std::filesystem::create_directories(common.out, ec);
  const auto path = std::filesystem::path(common.out) / (name + "." + common.format);
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text)) {
    std::cerr << "error (io): cannot write " << path.string() << "\n";
    return 1;
  }
  std::cout << path.string() << "\n";
  return exit_code;
}

void print_mesh_summary(const std::string& report) {
  const auto j = nlohmann::json::parse(report);
  for (const auto& m : j["meshes"]) {
    std::cerr << "mesh " << m["problem"].get<std::string>() << ": " << m["vertices"] << " vertices, "
              << m["quads"] << " quads, " << m["holes"] << " holes\n";
    if (m.contains("reference_deviation"))
      std::cerr << "  max deviation from reference surface: " << m["reference_deviation"].get<double>() << "\n";
    const auto& rows = m["sigma_sign_changes"];
    std::cerr << "  sigma sign changes in " << rows.size() << " of " << m["grid"][0] << " rows, "
              << m["off_curve_sign_change_rows"] << " away from s = 0\n";
    for (const auto& row : rows) {
      bool off = false;
      for (const auto& s : row["s"]) off = off || std::abs(s.get<double>()) > 1e-9;
      if (!off) continue;
      std::cerr << "    t = " << row["t"].get<double>() << ": s =";
      for (const auto& s : row["s"]) std::cerr << " " << s.get<double>();
      std::cerr << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tangent surfaces of curves under affine connections: classification, scans, meshes, trials"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--tol", common.tol, "Rank tolerance (default 1e-8 or the problem file's)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", common.out, "Output directory");
  app.add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", common.threads, "Worker threads, 0 for all cores");
  app.add_flag("--no-margin", common.no_margin, "Skip the re-runs at tol/10 and 10 tol");

  std::string problem;
  auto* classify = app.add_subcommand("classify", "Classify the requested points of each problem");
  classify->add_option("file", problem, "Problem file")->required()->check(CLI::ExistingFile);
  auto* scan = app.add_subcommand("scan", "Scan each problem's interval for singular events");
  scan->add_option("file", problem, "Problem file")->required()->check(CLI::ExistingFile);
  auto* mesh = app.add_subcommand("mesh", "Write OBJ (and CSV) meshes of the tangent surfaces");
  mesh->add_option("file", problem, "Problem file")->required()->check(CLI::ExistingFile);

  ntan_trial_options trial_opts;
  ntan_trial_options_init(&trial_opts);
  bool directed = false;
  auto* trial = app.add_subcommand("trial", "Random genericity trial of curve types");
  trial->add_option("--m", trial_opts.m, "Dimension")->check(CLI::Range(2, NTAN_MAX_DIMENSION));
  trial->add_option("--curves", trial_opts.curves, "Number of random curves")->check(CLI::PositiveNumber);
  trial->add_option("--points", trial_opts.points, "Points per curve")->check(CLI::PositiveNumber);
  trial->add_option("--degree", trial_opts.degree, "Curve degree, 0 for m + 1")->check(CLI::NonNegativeNumber);
  trial->add_option("--seed", trial_opts.seed, "Seed");
  trial->add_option("--ell", trial_opts.ell, "Order of the zero of c (directed)")->check(CLI::Range(0, 3));
  trial->add_flag("--directed", directed, "Directed curves with a marked zero of c");

  auto* verify = app.add_subcommand("verify", "Run the bundled self-check suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ntan_run_options run;
  ntan_run_options_init(&run);
  run.tol = common.tol;
  run.threads = common.threads;
  run.margin_check = common.no_margin ? 0 : 1;
  run.format = common.format.c_str();

  char* report = nullptr;
  int exit_code = 0;
  ntan_status status = NTAN_OK;
  if (classify->parsed()) {
    status = ntan_run_classify(problem.c_str(), &run, &report, &exit_code);
    if (status != NTAN_OK) return report_error(status);
    return deliver(common, "classify", report, exit_code);
  }
  if (scan->parsed()) {
    status = ntan_run_scan(problem.c_str(), &run, &report, &exit_code);
    if (status != NTAN_OK) return report_error(status);
    return deliver(common, "scan", report, exit_code);
  }
  if (mesh->parsed()) {
    const std::string dir = common.out.empty() ? "." : common.out;
    run.out_dir = dir.c_str();
    status = ntan_run_mesh(problem.c_str(), &run, &report, &exit_code);
    if (status != NTAN_OK) return report_error(status);
    print_mesh_summary(report);
    Common json_out = common;
    json_out.format = "json";
    return deliver(json_out, "mesh", report, exit_code);
  }
  if (trial->parsed()) {
    trial_opts.directed = directed ? 1 : 0;
    trial_opts.threads = common.threads;
    if (common.tol > 0) trial_opts.tol = common.tol;
    status = ntan_run_trial(&trial_opts, common.format.c_str(), &report, &exit_code);
    if (status != NTAN_OK) return report_error(status);
    return deliver(common, directed ? "trial-directed" : "trial", report, exit_code);
  }
  if (verify->parsed()) {
    status = ntan_run_verify(common.tol, common.format.c_str(), &report, &exit_code);
    if (status != NTAN_OK) return report_error(status);
    return deliver(common, "verify", report, exit_code);
  }
  return 1;
}
