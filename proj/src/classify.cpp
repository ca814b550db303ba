#include "ntan/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ntan/error.hpp"

namespace ntan {

namespace {

constexpr double kPsiStep = 1e-4;

std::vector<Expr> factor_outputs(const DirectedCurveSpec& d) {
  return {d.factor, differentiate(d.factor, kParameterT)};
}

std::string index_name(const char* prefix, std::initializer_list<int> idx) {
  std::string s = prefix;
  s += "(";
  bool first = true;
  for (int i : idx) {
    if (!first) s += ",";
    s += std::to_string(i);
    first = false;
  }
  return s + ")";
}

SingularityClass unresolved(SingularityClass out, std::string reason) {
  out.kind = SingularityKind::Unresolved;
  out.reason = std::move(reason);
  return out;
}

std::string band_reason(const std::string& what, double w, double tol) {
  char buf[128];
  std::snprintf(buf, sizeof buf, " = %.3g lies in [%.3g, %.3g]", w, tol / 10, 10 * tol);
  return "margin: " + what + buf;
}

}  // namespace

const char* to_string(SingularityKind kind) {
  switch (kind) {
    case SingularityKind::Regular: return "Regular";
    case SingularityKind::CuspidalEdge: return "CuspidalEdge";
    case SingularityKind::FoldedUmbrella: return "FoldedUmbrella";
    case SingularityKind::Swallowtail: return "Swallowtail";
    case SingularityKind::OpenSwallowtail: return "OpenSwallowtail";
    case SingularityKind::Fold: return "Fold";
    case SingularityKind::DegeneratePsiZero: return "DegeneratePsiZero";
    case SingularityKind::Unresolved: return "Unresolved";
  }
  return "Unresolved";
}

Ladder ladder(double witness, double tol) {
  if (witness >= 10.0 * tol) return Ladder::Nonzero;
  if (witness <= tol / 10.0) return Ladder::Zero;
  return Ladder::Band;
}

PointClassifier::PointClassifier(const Connection& c, const CurveSpec& curve,
                                 const ClassifyOptions& options)
    : PointClassifier(c, immersed_frame(curve), options) {}

PointClassifier::PointClassifier(const Connection& c, const DirectedCurveSpec& d,
                                 const ClassifyOptions& options)
    : sym_(c.torsion_free() ? c : c.symmetrized()),
      d_(d),
      options_(options),
      k_max_(std::max(options.k_max > 0 ? options.k_max : c.dimension() + 2,
                      c.dimension() == 3 ? 4 : 5)),
      curve_tower_(sym_, d.curve, differentiate(std::span<const Expr>(d.curve.components), kParameterT),
                   k_max_),
      frame_tower_(sym_, d.curve, d.frame, 4),
      factor_program_(factor_outputs(d)) {}

std::vector<Vec> PointClassifier::curve_columns(double t) const {
  return curve_tower_.rows_at(t, k_max_);
}

std::vector<Vec> PointClassifier::frame_columns(double t) const { return frame_tower_.rows_at(t, 4); }

double PointClassifier::factor(double t) const { return factor_program_.evaluate(Env{t, {}})[0]; }

double PointClassifier::factor_dt(double t) const {
  return factor_program_.evaluate(Env{t, {}})[1];
}

Vec PointClassifier::characteristic_field(double t) const { return frame_tower_.row(2, t); }

Characteristic PointClassifier::characteristic(double t, std::vector<int> pivots) const {
  const auto cols = frame_tower_.rows_at(t, 3);
  Characteristic ch;
  ch.coframe = orthonormal_complement(cols[0], cols[1], pivots);
  ch.pivots = std::move(pivots);
  ch.field = cols[2];
  ch.psi = Vec(static_cast<Eigen::Index>(ch.coframe.size()));
  for (std::size_t i = 0; i < ch.coframe.size(); ++i)
    ch.psi(static_cast<Eigen::Index>(i)) = ch.coframe[i].dot(ch.field);
  return ch;
}

Vec PointClassifier::psi_derivative(double t, const std::vector<int>& pivots) const {
  const double h = kPsiStep;
  const auto psi = [&](double x) { return characteristic(x, pivots).psi; };
  return (-psi(t + 2 * h) + 8.0 * psi(t + h) - 8.0 * psi(t - h) + psi(t - 2 * h)) / (12.0 * h);
}

bool PointClassifier::psi_vanishes_identically(double t0, std::vector<Witness>* witnesses) const {
  const double tol = options_.tol;
  const double w = options_.window;
  const double h = w / 20.0;
  double worst = 0.0;
  try {
    for (int i = 0; i <= 20; ++i) {
      // |psi| does not depend on the choice of orthonormal coframe.
      const auto ch = characteristic(t0 + (i - 10) * h);
      worst = std::max(worst, ch.psi.norm() / std::max(1.0, ch.field.norm()));
    }
  } catch (const Error&) {
    if (witnesses) witnesses->push_back({"psi_window_max", std::numeric_limits<double>::quiet_NaN()});
    return false;
  }
  if (witnesses) witnesses->push_back({"psi_window_max", worst});
  if (worst > tol) return false;

  std::vector<int> pivots;
  const auto base = characteristic(t0);
  pivots = base.pivots;
  const auto psi = [&](int k) { return characteristic(t0 + k * h, pivots).psi; };
  const Vec p0 = base.psi, p1 = psi(1), m1 = psi(-1), p2 = psi(2), m2 = psi(-2);
  const double d1 = ((p1 - m1) / (2 * h)).norm();
  const double d2 = ((p1 - 2.0 * p0 + m1) / (h * h)).norm();
  const double d3 = ((p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2 * h * h * h)).norm();
  const double scale = std::max(1.0, base.field.norm());
  const double dmax = std::max({d1, d2, d3}) / scale;
  if (witnesses) witnesses->push_back({"psi_derivatives_max", dmax});
  return dmax <= tol;
}

const TangentSurface& PointClassifier::surface() const {
  if (!surface_) surface_.emplace(sym_, d_);
  return *surface_;
}

DegenerateDiagnostics PointClassifier::diagnostic(double t0) const {
  DiagnosticOptions opt;
  opt.window = options_.window;
  return degenerate_diagnostic(surface(), t0, opt);
}

TorsionlessReport PointClassifier::torsionless(double t_lo, double t_hi, int n_probe) const {
  TorsionlessReport r;
  r.min_pair_witness = std::numeric_limits<double>::infinity();
  const double tol = options_.tol;
  bool ok = true;
  for (int i = 0; i < n_probe; ++i) {
    const double t = n_probe == 1 ? 0.5 * (t_lo + t_hi) : t_lo + (t_hi - t_lo) * i / (n_probe - 1);
    const auto cols = curve_tower_.rows_at(t, 3);
    const double pair = independence_witness(std::span<const Vec>(cols.data(), 2));
    const double triple = independence_witness(cols);
    r.min_pair_witness = std::min(r.min_pair_witness, pair);
    r.max_triple_witness = std::max(r.max_triple_witness, triple);
    if (pair < 10.0 * tol || triple > tol) ok = false;
  }
  r.torsionless = ok;
  return r;
}

SingularityClass PointClassifier::degenerate_branch(double t0, SingularityClass out,
                                                    const char* what) const {
  if (!psi_vanishes_identically(t0, &out.witnesses))
    return unresolved(std::move(out), std::string("no recognition criterion: ") + what);
  const double w = options_.window;
  if (sym_.is_flat() && torsionless(t0 - w / 2, t0 + w / 2, 21).torsionless)
    out.kind = SingularityKind::Fold;
  else
    out.kind = SingularityKind::DegeneratePsiZero;
  if (options_.diagnostics) out.diagnostics = diagnostic(t0);
  return out;
}

SingularityClass PointClassifier::classify(double t0) const {
  SingularityClass out;
  const double tol = options_.tol;
  out.tolerance = tol;
  const int m = sym_.dimension();
  std::vector<Vec> cols;
  try {
    cols = curve_columns(t0);
  } catch (const Error& e) {
    return unresolved(std::move(out), std::string("evaluation failed: ") + e.what());
  }
  out.signature = type_signature(cols, m, tol);
  if (m < 3) return unresolved(std::move(out), "classification needs dimension at least 3");

  const auto W = [&](std::initializer_list<int> idx) {
    std::vector<Vec> sel;
    for (int i : idx) sel.push_back(cols[static_cast<std::size_t>(i - 1)]);
    const double w = independence_witness(sel);
    out.witnesses.push_back({index_name("indep", idx), w});
    return w;
  };

  try {
    const double w1 = W({1});
    switch (ladder(w1, tol)) {
      case Ladder::Band:
        return unresolved(std::move(out), band_reason("|nabla gamma|", w1, tol));
      case Ladder::Nonzero: {
        const double w12 = W({1, 2});
        const auto l12 = ladder(w12, tol);
        if (l12 == Ladder::Band) return unresolved(std::move(out), band_reason("indep(1,2)", w12, tol));
        if (l12 == Ladder::Zero)
          return unresolved(std::move(out),
                            "nabla gamma and nabla^2 gamma are dependent; frontal criteria do not apply");
        const double w123 = W({1, 2, 3});
        const auto l123 = ladder(w123, tol);
        if (l123 == Ladder::Nonzero) {
          out.kind = SingularityKind::CuspidalEdge;
          return out;
        }
        if (l123 == Ladder::Band) return unresolved(std::move(out), band_reason("indep(1,2,3)", w123, tol));
        if (m == 3) {
          const double w124 = W({1, 2, 4});
          const auto l124 = ladder(w124, tol);
          if (l124 == Ladder::Nonzero) {
            out.kind = SingularityKind::FoldedUmbrella;
            return out;
          }
          if (l124 == Ladder::Band)
            return unresolved(std::move(out), band_reason("indep(1,2,4)", w124, tol));
          return degenerate_branch(t0, std::move(out), "type beyond (1,2,4)");
        }
        return degenerate_branch(t0, std::move(out),
                                 "nabla^3 gamma in span(nabla gamma, nabla^2 gamma) for m >= 4");
      }
      case Ladder::Zero: {
        const double w = m == 3 ? W({2, 3, 4}) : W({2, 3, 4, 5});
        const auto l = ladder(w, tol);
        if (l == Ladder::Nonzero) {
          out.kind = m == 3 ? SingularityKind::Swallowtail : SingularityKind::OpenSwallowtail;
          return out;
        }
        if (l == Ladder::Band) return unresolved(std::move(out), band_reason(out.witnesses.back().name, w, tol));
        return unresolved(std::move(out), "nabla gamma vanishes but the higher derivatives are dependent");
      }
    }
  } catch (const Error& e) {
    return unresolved(std::move(out), std::string("evaluation failed: ") + e.what());
  }
  return unresolved(std::move(out), "unreachable");
}

SingularityClass PointClassifier::classify_via_psi(double t0) const {
  SingularityClass out;
  const double tol = options_.tol;
  out.tolerance = tol;
  const int m = sym_.dimension();
  std::vector<Vec> frame;
  try {
    out.signature = type_signature(curve_columns(t0), m, tol);
    frame = frame_columns(t0);
  } catch (const Error& e) {
    return unresolved(std::move(out), std::string("evaluation failed: ") + e.what());
  }
  if (m < 3) return unresolved(std::move(out), "classification needs dimension at least 3");

  const auto W = [&](std::initializer_list<int> idx, const char* name) {
    std::vector<Vec> sel;
    for (int i : idx) sel.push_back(frame[static_cast<std::size_t>(i)]);
    const double w = independence_witness(sel);
    out.witnesses.push_back({name, w});
    return w;
  };

  try {
    const double wf = W({0, 1}, "frame(V1,F)");
    const auto lf = ladder(wf, tol);
    if (lf == Ladder::Band) return unresolved(std::move(out), band_reason("frame(V1,F)", wf, tol));
    if (lf == Ladder::Zero) return unresolved(std::move(out), "frontal frame (V1, F) is degenerate");

    const double c0 = factor(t0);
    out.witnesses.push_back({"factor", std::abs(c0)});
    switch (ladder(std::abs(c0), tol)) {
      case Ladder::Band:
        return unresolved(std::move(out), band_reason("|c(t0)|", std::abs(c0), tol));
      case Ladder::Nonzero: {
        const auto ch = characteristic(t0);
        const double wpsi = ch.psi.norm() / std::max(1.0, ch.field.norm());
        out.witnesses.push_back({"psi", wpsi});
        const auto lpsi = ladder(wpsi, tol);
        if (lpsi == Ladder::Nonzero) {
          out.kind = SingularityKind::CuspidalEdge;
          return out;
        }
        if (lpsi == Ladder::Band) return unresolved(std::move(out), band_reason("|psi|", wpsi, tol));
        if (m != 3) return degenerate_branch(t0, std::move(out), "psi(t0) = 0 for m >= 4");
        const Vec fd = psi_derivative(t0, ch.pivots);
        const Vec& third = frame[3];
        Vec closed(static_cast<Eigen::Index>(ch.coframe.size()));
        for (std::size_t i = 0; i < ch.coframe.size(); ++i)
          closed(static_cast<Eigen::Index>(i)) = ch.coframe[i].dot(third);
        const double mismatch = (fd - closed).norm();
        out.witnesses.push_back({"dpsi_selfcheck", mismatch});
        if (mismatch > 1e-5 * std::max(1.0, closed.norm()))
          return unresolved(std::move(out), "psi derivative self-check failed");
        const double wd = closed.norm() / std::max(1.0, third.norm());
        out.witnesses.push_back({"dpsi", wd});
        const auto ld = ladder(wd, tol);
        if (ld == Ladder::Nonzero) {
          out.kind = SingularityKind::FoldedUmbrella;
          return out;
        }
        if (ld == Ladder::Band) return unresolved(std::move(out), band_reason("|dpsi/dt|", wd, tol));
        return degenerate_branch(t0, std::move(out), "psi and its derivative vanish");
      }
      case Ladder::Zero: {
        const double c1 = std::abs(factor_dt(t0));
        out.witnesses.push_back({"factor_dt", c1});
        const auto l1 = ladder(c1, tol);
        if (l1 == Ladder::Band) return unresolved(std::move(out), band_reason("|c'(t0)|", c1, tol));
        if (l1 == Ladder::Zero) return unresolved(std::move(out), "factor vanishes to order >= 2");
        const double w = m == 3 ? W({0, 1, 2}, "indep(u,Du,D2u)") : W({0, 1, 2, 3}, "indep(u,Du,D2u,D3u)");
        const auto l = ladder(w, tol);
        if (l == Ladder::Nonzero) {
          out.kind = m == 3 ? SingularityKind::Swallowtail : SingularityKind::OpenSwallowtail;
          return out;
        }
        if (l == Ladder::Band) return unresolved(std::move(out), band_reason(out.witnesses.back().name, w, tol));
        return unresolved(std::move(out), "frame derivatives are dependent at a zero of the factor");
      }
    }
  } catch (const Error& e) {
    return unresolved(std::move(out), std::string("evaluation failed: ") + e.what());
  }
  return unresolved(std::move(out), "unreachable");
}

Vec characteristic_field(const Connection& c, const DirectedCurveSpec& d, double t) {
  return PointClassifier(c, d).characteristic_field(t);
}

Characteristic characteristic_psi(const Connection& c, const DirectedCurveSpec& d, double t) {
  return PointClassifier(c, d).characteristic(t);
}

SingularityClass classify_point(const Connection& c, const CurveSpec& curve, double t0,
                                const ClassifyOptions& options) {
  return PointClassifier(c, curve, options).classify(t0);
}

SingularityClass classify_point(const Connection& c, const DirectedCurveSpec& d, double t0,
                                const ClassifyOptions& options) {
  return PointClassifier(c, d, options).classify(t0);
}

SingularityClass classify_via_psi(const Connection& c, const DirectedCurveSpec& d, double t0,
                                  const ClassifyOptions& options) {
  return PointClassifier(c, d, options).classify_via_psi(t0);
}

// Where gamma'(t0) = 0 the immersed frame degenerates; divide out a simple zero.
SingularityClass classify_via_psi(const Connection& c, const CurveSpec& curve, double t0,
                                  const ClassifyOptions& options) {
  const Vec v = evaluate_curve(differentiate(std::span<const Expr>(curve.components), kParameterT), t0);
  if (ladder(v.norm(), options.tol) != Ladder::Zero)
    return PointClassifier(c, curve, options).classify_via_psi(t0);
  DirectedCurveSpec d;
  try {
    d = directed_frame(c, curve, t0, 2);
  } catch (const Error& e) {
    SingularityClass out;
    out.tolerance = options.tol;
    return unresolved(std::move(out), std::string("no directed frame through the zero of gamma': ") + e.what());
  }
  return PointClassifier(c, d, options).classify_via_psi(t0);
}

TorsionlessReport torsionless_test(const Connection& c, const CurveSpec& curve, double t_lo,
                                   double t_hi, int n_probe, double tol) {
  ClassifyOptions opt;
  opt.tol = tol;
  return PointClassifier(c, curve, opt).torsionless(t_lo, t_hi, n_probe);
}

namespace {

struct Sample {
  double t;
  double s;
  Vec f;
};

// Levenberg-Marquardt on |f(t', s') - target|^2 keeping s' on one side of 0.
Sample refine_partner(const TangentSurface& surface, const Vec& target, Sample start, double goal) {
  double lambda = 1e-3;
  Sample cur = start;
  double err = (cur.f - target).squaredNorm();
  for (int iter = 0; iter < 25 && err > goal * goal; ++iter) {
    SurfacePartials p;
    try {
      p = surface.partials(cur.t, cur.s);
    } catch (const Error&) {
      break;
    }
    Mat J(target.size(), 2);
    J.col(0) = p.df_dt;
    J.col(1) = p.df_ds;
    const Vec r = p.f - target;
    const Eigen::Matrix2d JtJ = J.transpose() * J;
    const Eigen::Vector2d g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 8 && !improved; ++tries) {
      Eigen::Matrix2d A = JtJ;
      A(0, 0) += lambda * std::max(1e-12, JtJ(0, 0));
      A(1, 1) += lambda * std::max(1e-12, JtJ(1, 1));
      const Eigen::Vector2d step = -A.ldlt().solve(g);
      const double nt = cur.t + step(0);
      const double ns = cur.s + step(1);
      if (ns * start.s <= 0.0 || !std::isfinite(nt)) {
        lambda *= 4.0;
        continue;
      }
      try {
        const Vec f = surface.evaluate(nt, ns);
        const double e = (f - target).squaredNorm();
        if (e < err) {
          const bool stalled = err - e < 1e-12 * err;
          cur = Sample{nt, ns, f};
          err = e;
          lambda = std::max(lambda / 3.0, 1e-12);
          improved = true;
          if (stalled) return cur;
        } else {
          lambda *= 4.0;
        }
      } catch (const Error&) {
        lambda *= 4.0;
      }
    }
    if (!improved) break;
  }
  return cur;
}

}  // namespace

DegenerateDiagnostics degenerate_diagnostic(const TangentSurface& surface, double t0,
                                            const DiagnosticOptions& options) {
  const double w = options.window;
  DegenerateDiagnostics out;
  out.window = w;

  std::vector<Sample> samples;
  for (int i = 0; i <= 8; ++i)
    for (double frac : {0.25, 0.375, 0.5})
      for (double sign : {-1.0, 1.0}) {
        const double t = t0 + w / 2 * (-1.0 + i / 4.0);
        const double s = sign * frac * w;
        try {
          samples.push_back({t, s, surface.evaluate(t, s)});
        } catch (const Error&) {
        }
      }
  std::vector<Sample> seeds;
  for (int i = 0; i <= 30; ++i)
    for (int k = 0; k <= 8; ++k)
      for (double sign : {-1.0, 1.0}) {
        const double t = t0 - 1.5 * w + 3.0 * w * i / 30.0;
        const double s = sign * (w / 8 + k * w / 16);
        try {
          seeds.push_back({t, s, surface.evaluate(t, s)});
        } catch (const Error&) {
        }
      }
  out.samples = static_cast<int>(samples.size());
  if (samples.empty()) return out;

  const int m = surface.dimension();
  Vec lo = samples.front().f, hi = samples.front().f;
  for (const auto& s : samples) {
    lo = lo.cwiseMin(s.f);
    hi = hi.cwiseMax(s.f);
  }
  (void)m;
  out.epsilon = options.epsilon_scale * (hi - lo).norm();
  const double min_dt = w / 20.0;

  std::vector<double> closest;
  for (const auto& p : samples) {
    std::vector<std::pair<double, const Sample*>> ranked;
    for (const auto& q : seeds) {
      if (q.s * p.s >= 0.0 || std::abs(q.t - p.t) < min_dt) continue;
      ranked.emplace_back((q.f - p.f).squaredNorm(), &q);
    }
    const std::size_t keep = std::min<std::size_t>(2, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < keep; ++k) {
      const Sample r = refine_partner(surface, p.f, *ranked[k].second, out.epsilon / 100.0);
      if (std::abs(r.t - p.t) < min_dt) continue;
      best = std::min(best, (r.f - p.f).norm());
      if (best <= out.epsilon / 100.0) break;
    }
    if (best <= out.epsilon) ++out.matched;
    closest.push_back(out.epsilon > 0.0 ? best / out.epsilon : best);
  }
  out.match_fraction = static_cast<double>(out.matched) / static_cast<double>(out.samples);
  out.fold_like = out.match_fraction >= 0.5;
  std::nth_element(closest.begin(), closest.begin() + static_cast<std::ptrdiff_t>(closest.size() / 2),
                   closest.end());
  out.closest = closest[closest.size() / 2];
  return out;
}

namespace {

double bisect(const std::function<double(double)>& g, double a, double b, double ga) {
  for (int i = 0; i < 200 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++i) {
    const double mid = 0.5 * (a + b);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<ScanEvent> scan_curve(const Connection& c, const DirectedCurveSpec& d, double t_lo,
                                  double t_hi, int n, const ClassifyOptions& options) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "scan needs at least two grid points");
  const PointClassifier pc(c, d, options);
  const int m = c.dimension();
  std::vector<double> grid;
  for (int i = 0; i < n; ++i) grid.push_back(t_lo + (t_hi - t_lo) * i / (n - 1));

  std::vector<ScanEvent> events;
  for (double t : grid) events.push_back({t, pc.classify(t), false});

  std::vector<std::function<double(double)>> signs;
  if (m == 3)
    signs.emplace_back([&pc](double t) {
      const auto cols = pc.curve_columns(t);
      Eigen::Matrix3d a;
      for (int k = 0; k < 3; ++k) a.col(k) = cols[static_cast<std::size_t>(k)];
      return a.determinant();
    });
  if (!d.factor.is_constant()) signs.emplace_back([&pc](double t) { return pc.factor(t); });

  std::vector<double> roots;
  for (const auto& g : signs) {
    std::vector<double> values;
    try {
      for (double t : grid) values.push_back(g(t));
    } catch (const Error&) {
      continue;
    }
    for (int i = 0; i + 1 < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (values[k] * values[k + 1] < 0.0) roots.push_back(bisect(g, grid[k], grid[k + 1], values[k]));
    }
  }
  std::sort(roots.begin(), roots.end());
  for (double r : roots) {
    const bool duplicate = std::any_of(events.begin(), events.end(), [&](const ScanEvent& e) {
      return std::abs(e.t - r) <= 1e-12 * std::max(1.0, std::abs(r));
    });
    if (!duplicate) events.push_back({r, pc.classify(r), true});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ScanEvent& a, const ScanEvent& b) { return a.t < b.t; });
  return events;
}

std::vector<ScanEvent> scan_curve(const Connection& c, const CurveSpec& curve, double t_lo,
                                  double t_hi, int n, const ClassifyOptions& options) {
  return scan_curve(c, immersed_frame(curve), t_lo, t_hi, n, options);
}

}  // namespace ntan
