#pragma once

// Batch runs over problem files, random genericity trials and the bundled
// self-check suite.  Reports serialize to JSON ("schema": 1) or CSV; output is a
// pure function of the inputs and the seed, whatever the thread count.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ntan/classify.hpp"
#include "ntan/problem.hpp"

namespace ntan {

inline constexpr int kReportSchema = 1;

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitUnresolved = 2 };

struct RunOptions {
  std::optional<double> tol;     // overrides the file
  std::optional<double> window;  // overrides the file
  bool margin_check = true;      // re-run at tol / 10 and 10 tol
  unsigned threads = 0;
};

struct ClassifyRecord {
  std::string problem;
  double t0 = 0.0;
  bool refined = false;
  SingularityClass cls;
  SingularityClass psi;  // same point through the characteristic function
  bool margin_sensitive = false;
  SingularityKind kind_low_tol = SingularityKind::Unresolved;
  SingularityKind kind_high_tol = SingularityKind::Unresolved;
  double window = 1.0;
};

struct ClassifyReport {
  std::string command;  // "classify" or "scan"
  std::string origin;
  std::vector<ClassifyRecord> records;

  bool any_unresolved() const;
  int exit_code() const { return any_unresolved() ? kExitUnresolved : kExitOk; }
};

// Problems with t0 values are classified there; problems with only scan
// parameters are scanned.
ClassifyReport run_classify(const ProblemFile& file, const RunOptions& options = {});
// Every problem is scanned over its interval (n = 21 unless given).
ClassifyReport run_scan(const ProblemFile& file, const RunOptions& options = {});

struct SignChangeRow {
  double t = 0.0;
  std::vector<double> s;  // midpoints of sigma sign changes along the row
};

struct MeshReport {
  std::string problem;
  int nt = 0;
  int ns = 0;
  int vertices = 0;
  int quads = 0;
  int holes = 0;
  std::vector<SignChangeRow> sign_changes;
  // Rows with a sign change further than two grid steps from s = 0.
  int off_curve_rows = 0;
  std::optional<double> reference_deviation;
  std::vector<std::string> files;
};

// Writes <out_dir>/<name>.obj for every problem with grid parameters, plus
// <name>.csv when m > 3 or format == "csv".
std::vector<MeshReport> run_mesh(const ProblemFile& file, const std::string& out_dir,
                                 const std::string& format = "json", const RunOptions& options = {});

struct TrialOptions {
  int m = 3;
  int curves = 1000;
  int points = 10;  // per curve; the directed trial uses one marked point
  int degree = 0;   // 0 means m + 1
  std::uint64_t seed = 42;
  double tol = 1e-8;
  int ell = 1;  // directed: order of the zero of c at the marked point
  std::optional<Connection> connection;  // random per curve when empty
  unsigned threads = 0;
};

struct OffGenericHit {
  int sample = 0;
  double t = 0.0;
  std::string type;
  std::vector<Witness> witnesses;
};

struct ConstructedCheck {
  std::string frame_type;
  std::string gamma_type;
  std::string predicted;
  bool matches = false;
};

struct TrialReport {
  bool directed = false;
  int m = 0;
  int curves = 0;
  int points = 0;
  int degree = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int ell = 0;
  int samples = 0;
  int resolved = 0;
  int band = 0;  // type differs at tol / 10 or 10 tol
  std::map<std::string, int> counts;  // type -> samples, "unresolved" for the band
  std::vector<std::string> generic_types;
  std::string leading_type;
  double leading_fraction = 0.0;  // among resolved samples
  int off_generic = 0;
  std::vector<OffGenericHit> hits;  // first 50 off-generic samples
  // Directed trial: gamma type against frame type shifted by ell.
  int shift_checked = 0;
  int shift_matched = 0;
  std::optional<ConstructedCheck> constructed;
};

TrialReport genericity_trial(const TrialOptions& options);
TrialReport directed_genericity_trial(const TrialOptions& options);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

// Torsionless degenerate surface, flat normal forms, the characteristic field
// identities on random instances and invariance under symmetrization.
VerifyReport verify(double tol = 1e-8);

std::string to_json(const ClassifyReport& report);
std::string to_csv(const ClassifyReport& report);
std::string to_json(const std::vector<MeshReport>& reports);
std::string to_json(const TrialReport& report);
std::string to_csv(const TrialReport& report);
std::string to_json(const VerifyReport& report);
std::string to_csv(const VerifyReport& report);

}  // namespace ntan
