#pragma once

// Singularity classes of tangent surfaces at points (t0, 0) of the curve, by the
// covariant rank criteria and, independently, by the characteristic function
// psi of the frontal.

#include <optional>
#include <string>
#include <vector>

#include "ntan/connection.hpp"
#include "ntan/covariant.hpp"
#include "ntan/surface.hpp"

namespace ntan {

enum class SingularityKind {
  Regular,
  CuspidalEdge,
  FoldedUmbrella,
  Swallowtail,
  OpenSwallowtail,
  Fold,
  DegeneratePsiZero,
  Unresolved,
};

const char* to_string(SingularityKind kind);

struct Witness {
  std::string name;
  double value = 0.0;
};

// Two-to-one test on a punctured window around (t0, 0).
struct DegenerateDiagnostics {
  bool fold_like = false;
  int samples = 0;
  int matched = 0;
  double match_fraction = 0.0;
  double epsilon = 0.0;  // match radius in the image
  double window = 0.0;
  double closest = 0.0;  // median over samples of the best partner distance / epsilon

  std::string verdict() const { return fold_like ? "fold-like (two-to-one)" : "injective-like"; }
};

struct SingularityClass {
  SingularityKind kind = SingularityKind::Unresolved;
  TypeSignature signature;
  std::vector<Witness> witnesses;
  std::optional<DegenerateDiagnostics> diagnostics;
  std::string reason;  // set for Unresolved
  double tolerance = 0.0;
};

struct ClassifyOptions {
  double tol = 1e-8;
  int k_max = 0;        // 0 means m + 2
  double window = 1.0;  // psi == 0 certification and two-to-one diagnostic
  bool diagnostics = true;
};

// Nonzero means witness >= 10 tol, zero means witness <= tol / 10.
enum class Ladder { Zero, Band, Nonzero };
Ladder ladder(double witness, double tol);

// psi_i = <l_i, (nabla)^2 u> with l_1..l_{m-2} an orthonormal basis of the
// complement of span(u, nabla u).
struct Characteristic {
  std::vector<Vec> coframe;
  Vec psi;
  Vec field;  // (nabla)^2 u
  std::vector<int> pivots;
};

struct ScanEvent {
  double t = 0.0;
  SingularityClass cls;
  bool refined = false;  // located by bisection between grid points
};

struct TorsionlessReport {
  bool torsionless = false;
  double min_pair_witness = 0.0;    // smallest independence witness of (nabla, nabla^2)
  double max_triple_witness = 0.0;  // largest of (nabla, nabla^2, nabla^3)
};

// Per-curve state shared by repeated queries: the connection is symmetrized
// once and the covariant towers are built once.
class PointClassifier {
 public:
  PointClassifier(const Connection& c, const DirectedCurveSpec& d, const ClassifyOptions& options = {});
  PointClassifier(const Connection& c, const CurveSpec& curve, const ClassifyOptions& options = {});

  const Connection& connection() const noexcept { return sym_; }
  const DirectedCurveSpec& directed() const noexcept { return d_; }
  const ClassifyOptions& options() const noexcept { return options_; }
  int k_max() const noexcept { return k_max_; }

  // [nabla gamma, ..., nabla^{k_max} gamma] at t.
  std::vector<Vec> curve_columns(double t) const;
  // [u, nabla u, nabla^2 u, nabla^3 u] at t.
  std::vector<Vec> frame_columns(double t) const;
  double factor(double t) const;
  double factor_dt(double t) const;

  Vec characteristic_field(double t) const;
  // `pivots` fixes the coframe seeds (empty: choose and report them).
  Characteristic characteristic(double t, std::vector<int> pivots = {}) const;
  // d psi / dt by 5-point differences with step 1e-4 on a fixed coframe.
  Vec psi_derivative(double t, const std::vector<int>& pivots) const;
  // |psi| <= tol at 21 probes over the window and difference quotients of
  // orders 1..3 at t0 below tol.
  bool psi_vanishes_identically(double t0, std::vector<Witness>* witnesses = nullptr) const;

  SingularityClass classify(double t0) const;
  SingularityClass classify_via_psi(double t0) const;
  DegenerateDiagnostics diagnostic(double t0) const;
  TorsionlessReport torsionless(double t_lo, double t_hi, int n_probe) const;

 private:
  SingularityClass degenerate_branch(double t0, SingularityClass out, const char* what) const;
  const TangentSurface& surface() const;

  Connection sym_;
  DirectedCurveSpec d_;
  ClassifyOptions options_;
  int k_max_ = 0;
  Tower curve_tower_;
  Tower frame_tower_;
  Program factor_program_;  // c, c'
  mutable std::optional<TangentSurface> surface_;
};

Vec characteristic_field(const Connection& c, const DirectedCurveSpec& d, double t);
Characteristic characteristic_psi(const Connection& c, const DirectedCurveSpec& d, double t);

SingularityClass classify_point(const Connection& c, const CurveSpec& curve, double t0,
                                const ClassifyOptions& options = {});
SingularityClass classify_point(const Connection& c, const DirectedCurveSpec& d, double t0,
                                const ClassifyOptions& options = {});
SingularityClass classify_via_psi(const Connection& c, const DirectedCurveSpec& d, double t0,
                                  const ClassifyOptions& options = {});
SingularityClass classify_via_psi(const Connection& c, const CurveSpec& curve, double t0,
                                  const ClassifyOptions& options = {});

TorsionlessReport torsionless_test(const Connection& c, const CurveSpec& curve, double t_lo,
                                   double t_hi, int n_probe = 21, double tol = 1e-8);

struct DiagnosticOptions {
  double window = 1.0;
  double epsilon_scale = 1e-5;  // times the image diameter of the window
};

DegenerateDiagnostics degenerate_diagnostic(const TangentSurface& surface, double t0,
                                            const DiagnosticOptions& options = {});

// Classifies n grid points of [t_lo, t_hi] and bisects sign changes of
// det(nabla gamma, nabla^2 gamma, nabla^3 gamma) (m = 3) and of the factor c.
std::vector<ScanEvent> scan_curve(const Connection& c, const DirectedCurveSpec& d, double t_lo,
                                  double t_hi, int n, const ClassifyOptions& options = {});
std::vector<ScanEvent> scan_curve(const Connection& c, const CurveSpec& curve, double t_lo,
                                  double t_hi, int n, const ClassifyOptions& options = {});

}  // namespace ntan
