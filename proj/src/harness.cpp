#include "ntan/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ntan/error.hpp"
#include "ntan/geodesic.hpp"
#include "ntan/oracles.hpp"
#include "ntan/random.hpp"
#include "ntan/surface.hpp"

namespace ntan {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kDefaultTol = 1e-8;
constexpr int kMaxHits = 50;

// Runs body(i) for i in [0, n) on a pool; callers store results by index.
void parallel_for(int n, unsigned threads, const std::function<void(int)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1)));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double resolve_tol(const Problem& p, const RunOptions& o) {
  return o.tol ? *o.tol : p.tol ? *p.tol : kDefaultTol;
}

double resolve_window(const Problem& p, const RunOptions& o) {
  return o.window ? *o.window : p.window ? *p.window : 1.0;
}

ClassifyOptions classify_options(const Problem& p, const RunOptions& o) {
  ClassifyOptions c;
  c.tol = resolve_tol(p, o);
  c.window = resolve_window(p, o);
  return c;
}

// Margin re-runs skip the (costly) two-to-one diagnostic.
struct MarginClassifiers {
  PointClassifier low;
  PointClassifier high;

  static ClassifyOptions scaled(ClassifyOptions o, double k) {
    o.tol *= k;
    o.diagnostics = false;
    return o;
  }
  MarginClassifiers(const Problem& p, const ClassifyOptions& o)
      : low(p.connection, p.directed, scaled(o, 0.1)), high(p.connection, p.directed, scaled(o, 10.0)) {}
};

ClassifyRecord make_record(const Problem& p, const PointClassifier& pc,
                           const std::optional<MarginClassifiers>& margin, double t0,
                           std::optional<SingularityClass> cls, bool refined) {
  ClassifyRecord r;
  r.problem = p.name;
  r.t0 = t0;
  r.refined = refined;
  r.window = pc.options().window;
  r.cls = cls ? std::move(*cls) : pc.classify(t0);
  // An immersed curve with gamma'(t0) = 0 needs a frame through the zero.
  const bool stationary = !p.has_frame && ladder(pc.frame_columns(t0)[0].norm(), pc.options().tol) == Ladder::Zero;
  r.psi = stationary ? classify_via_psi(pc.connection(), p.curve(), t0, pc.options()) : pc.classify_via_psi(t0);
  if (margin) {
    r.kind_low_tol = margin->low.classify(t0).kind;
    r.kind_high_tol = margin->high.classify(t0).kind;
    r.margin_sensitive = r.kind_low_tol != r.cls.kind || r.kind_high_tol != r.cls.kind;
  } else {
    r.kind_low_tol = r.kind_high_tol = r.cls.kind;
  }
  return r;
}

void scan_problem(const Problem& p, const RunOptions& o, ClassifyReport& report) {
  const auto opts = classify_options(p, o);
  const PointClassifier pc(p.connection, p.directed, opts);
  std::optional<MarginClassifiers> margin;
  if (o.margin_check) margin.emplace(p, opts);
  const int n = p.scan ? p.scan->n : 21;
  const auto events = scan_curve(p.connection, p.directed, p.curve().t_lo, p.curve().t_hi, n, opts);
  for (const auto& e : events) report.records.push_back(make_record(p, pc, margin, e.t, e.cls, e.refined));
}

ojson witnesses_json(const std::vector<Witness>& ws) {
  ojson out = ojson::array();
  for (const auto& w : ws) out.push_back({{"name", w.name}, {"value", w.value}});
  return out;
}

ojson class_json(const SingularityClass& c) {
  ojson j;
  j["class"] = to_string(c.kind);
  j["type_signature"] = c.signature.to_string();
  j["witnesses"] = witnesses_json(c.witnesses);
  if (c.kind == SingularityKind::Unresolved) j["reason"] = c.reason;
  if (c.diagnostics) {
    const auto& d = *c.diagnostics;
    j["diagnostics"] = {{"verdict", d.verdict()},        {"samples", d.samples},
                        {"matched", d.matched},          {"match_fraction", d.match_fraction},
                        {"epsilon", d.epsilon},          {"window", d.window},
                        {"median_closest", d.closest}};
  }
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string number(double x) {
  std::ostringstream ss;
  ss.precision(17);
  ss << x;
  return ss.str();
}

std::string witness_list(const std::vector<Witness>& ws) {
  std::string s;
  for (const auto& w : ws) s += (s.empty() ? "" : ";") + w.name + "=" + number(w.value);
  return s;
}

}  // namespace

bool ClassifyReport::any_unresolved() const {
  return std::any_of(records.begin(), records.end(),
                     [](const ClassifyRecord& r) { return r.cls.kind == SingularityKind::Unresolved; });
}

ClassifyReport run_classify(const ProblemFile& file, const RunOptions& options) {
  ClassifyReport report;
  report.command = "classify";
  report.origin = file.origin;
  for (const auto& p : file.problems) {
    if (p.t0.empty()) {
      if (!p.scan)
        throw Error(ErrorCode::Validation, file.origin + ":" + std::to_string(p.line) + ": problem \"" +
                                               p.name + "\" has neither t0 nor scan parameters");
      scan_problem(p, options, report);
      continue;
    }
    const auto opts = classify_options(p, options);
    const PointClassifier pc(p.connection, p.directed, opts);
    std::optional<MarginClassifiers> margin;
    if (options.margin_check) margin.emplace(p, opts);
    for (double t : p.t0) report.records.push_back(make_record(p, pc, margin, t, std::nullopt, false));
  }
  return report;
}

ClassifyReport run_scan(const ProblemFile& file, const RunOptions& options) {
  ClassifyReport report;
  report.command = "scan";
  report.origin = file.origin;
  for (const auto& p : file.problems) scan_problem(p, options, report);
  return report;
}

std::vector<MeshReport> run_mesh(const ProblemFile& file, const std::string& out_dir,
                                 const std::string& format, const RunOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());

  std::vector<MeshReport> reports;
  for (const auto& p : file.problems) {
    if (!p.grid) continue;
    const auto& g = *p.grid;
    const TangentSurface surface(p.connection, p.directed);
    const std::array<double, 2> t_range =
        g.t_range ? *g.t_range : std::array<double, 2>{p.curve().t_lo, p.curve().t_hi};
    MeshOptions mo;
    mo.threads = options.threads;
    const SurfaceMesh mesh = build_mesh(surface, t_range, g.s_range, g.nt, g.ns, mo);

    MeshReport r;
    r.problem = p.name;
    r.nt = mesh.nt;
    r.ns = mesh.ns;
    r.vertices = static_cast<int>(mesh.vertices.size());
    r.quads = static_cast<int>(mesh.quads.size());
    r.holes = mesh.holes();
    const double ds = (g.s_range[1] - g.s_range[0]) / (g.ns - 1);
    for (int i = 0; i < mesh.nt; ++i) {
      SignChangeRow row;
      row.t = mesh.t[static_cast<std::size_t>(i)];
      for (int j = 0; j + 1 < mesh.ns; ++j) {
        const double a = mesh.sigma[static_cast<std::size_t>(mesh.index(i, j))];
        const double b = mesh.sigma[static_cast<std::size_t>(mesh.index(i, j + 1))];
        if (std::isnan(a) || std::isnan(b)) continue;
        if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0))
          row.s.push_back(0.5 * (mesh.s[static_cast<std::size_t>(j)] + mesh.s[static_cast<std::size_t>(j + 1)]));
      }
      if (std::any_of(row.s.begin(), row.s.end(), [&](double s) { return std::abs(s) > 2.0 * ds; }))
        ++r.off_curve_rows;
      if (!row.s.empty()) r.sign_changes.push_back(std::move(row));
    }
    if (!p.reference_surface.empty()) {
      double dev = 0.0;
      for (int i = 0; i < mesh.nt; ++i)
        for (int j = 0; j < mesh.ns; ++j) {
          const auto k = static_cast<std::size_t>(mesh.index(i, j));
          if (!mesh.valid[k]) continue;
          for (int d = 0; d < mesh.dimension; ++d) {
            const double ref = evaluate_reference(p.reference_surface[static_cast<std::size_t>(d)],
                                                  mesh.t[static_cast<std::size_t>(i)],
                                                  mesh.s[static_cast<std::size_t>(j)]);
            dev = std::max(dev, std::abs(mesh.vertices[k](d) - ref));
          }
        }
      r.reference_deviation = dev;
    }

    const auto write = [&](const std::string& ext, const std::function<void(std::ostream&)>& body) {
      const std::string path = (fs::path(out_dir) / (p.name + ext)).string();
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
      body(out);
      if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
      r.files.push_back(path);
    };
    write(".obj", [&](std::ostream& o) { write_obj(mesh, o); });
    if (mesh.dimension > 3 || format == "csv") write(".csv", [&](std::ostream& o) { write_csv(mesh, o); });
    reports.push_back(std::move(r));
  }
  return reports;
}

namespace {

std::string type_list(int m, std::initializer_list<int> tail_shift) {
  // (1, 2, ..., m-1, m + shift) for each shift, as printed by TypeSignature.
  std::string out;
  for (int shift : tail_shift) {
    TypeSignature s;
    s.dimension = m;
    for (int l = 1; l < m; ++l) s.entries.push_back(l);
    s.entries.push_back(m + shift);
    out += s.to_string() + " ";
  }
  return out;
}

std::vector<std::string> split_types(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  for (std::string w; ss >> w;) out.push_back(w);
  return out;
}

TypeSignature shifted_type(int m, int from) {
  TypeSignature s;
  s.dimension = m;
  for (int l = 0; l < m; ++l) s.entries.push_back(from + l);
  return s;
}

struct TypedSample {
  double t = 0.0;
  TypeSignature type;
  bool resolved = false;
  std::vector<Witness> witnesses;
  // directed trial
  bool shift_applicable = false;
  bool shift_match = false;
};

TypedSample typed_sample(const std::vector<Vec>& cols, int m, double t, double tol) {
  TypedSample s;
  s.t = t;
  s.type = type_signature(cols, m, tol);
  const auto lo = type_signature(cols, m, tol / 10.0);
  const auto hi = type_signature(cols, m, tol * 10.0);
  s.resolved = s.type.complete() && lo == s.type && hi == s.type;
  const auto k = static_cast<std::size_t>(m);
  if (cols.size() >= k + 1) {
    s.witnesses.push_back({"indep(1..m)", independence_witness(std::span<const Vec>(cols.data(), k))});
    std::vector<Vec> alt(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(k - 1));
    alt.push_back(cols[k]);
    s.witnesses.push_back({"indep(1..m-1,m+1)", independence_witness(alt)});
  }
  return s;
}

void tally(TrialReport& r, const std::vector<std::vector<TypedSample>>& per_curve) {
  const auto generic = r.generic_types;
  int leading = 0;
  for (std::size_t i = 0; i < per_curve.size(); ++i)
    for (const auto& s : per_curve[i]) {
      ++r.samples;
      if (!s.resolved) {
        ++r.band;
        ++r.counts["unresolved"];
        continue;
      }
      ++r.resolved;
      const std::string type = s.type.to_string();
      ++r.counts[type];
      if (type == r.leading_type) ++leading;
      if (s.shift_applicable) {
        ++r.shift_checked;
        if (s.shift_match) ++r.shift_matched;
      }
      if (std::find(generic.begin(), generic.end(), type) == generic.end()) {
        ++r.off_generic;
        if (static_cast<int>(r.hits.size()) < kMaxHits)
          r.hits.push_back({static_cast<int>(i), s.t, type, s.witnesses});
      }
    }
  r.leading_fraction = r.resolved ? static_cast<double>(leading) / r.resolved : 0.0;
}

TrialReport trial_header(const TrialOptions& o, bool directed) {
  if (o.m < 2 || o.m > kMaxDimension) throw Error(ErrorCode::InvalidArgument, "trial dimension out of range");
  if (o.curves < 1 || o.points < 1) throw Error(ErrorCode::InvalidArgument, "trial needs curves and points");
  if (o.connection && o.connection->dimension() != o.m)
    throw Error(ErrorCode::InvalidArgument, "trial connection has the wrong dimension");
  TrialReport r;
  r.directed = directed;
  r.m = o.m;
  r.curves = o.curves;
  r.points = directed ? 1 : o.points;
  r.degree = o.degree > 0 ? o.degree : o.m + 1;
  if (r.degree < o.m + 1) throw Error(ErrorCode::InvalidArgument, "trial degree must be at least m + 1");
  r.seed = o.seed;
  r.tol = o.tol;
  r.ell = directed ? o.ell : 0;
  return r;
}

}  // namespace

TrialReport genericity_trial(const TrialOptions& o) {
  TrialReport r = trial_header(o, false);
  const int m = o.m;
  r.generic_types = split_types(m == 3 ? "(1,2,3) (1,2,4)" : type_list(m, {0, 1}));
  r.leading_type = shifted_type(m, 1).to_string();
  const int k_max = m + 2;

  std::vector<std::vector<TypedSample>> results(static_cast<std::size_t>(o.curves));
  parallel_for(o.curves, o.threads, [&](int i) {
    auto rng = SplitMix64::stream(o.seed, static_cast<std::uint64_t>(i));
    const CurveSpec curve = random_curve(rng, m, r.degree);
    const Connection c = o.connection ? *o.connection : random_connection(rng, m, true);
    const Tower tower(c, curve, differentiate(std::span<const Expr>(curve.components), kParameterT), k_max);
    auto& out = results[static_cast<std::size_t>(i)];
    for (int k = 0; k < o.points; ++k) {
      const double t = rng.uniform(-1.0, 1.0);
      out.push_back(typed_sample(tower.rows_at(t, k_max), m, t, o.tol));
    }
  });
  tally(r, results);
  return r;
}

namespace {

// gamma = q + integral of c u from t*, with c = (t - t*)^ell * b(t).
DirectedCurveSpec assemble_directed(int m, const std::vector<Polynomial>& u, const Polynomial& c, double t_star,
                                    const Vec& q) {
  std::vector<Expr> gamma, frame;
  for (int i = 0; i < m; ++i) {
    const Polynomial g = (c * u[static_cast<std::size_t>(i)]).integral(t_star, q(i));
    gamma.push_back(g.to_expr());
    frame.push_back(u[static_cast<std::size_t>(i)].to_expr());
  }
  return make_directed(make_curve(std::move(gamma), -1.0, 1.0), std::move(frame), c.to_expr());
}

Polynomial power_about(double t_star, int ell) {
  Polynomial p({1.0});
  for (int k = 0; k < ell; ++k) p = p * Polynomial({-t_star, 1.0});
  return p;
}

TypedSample directed_sample(const Connection& c, const DirectedCurveSpec& d, int m, int ell, double t,
                            double tol, TypeSignature* frame_out) {
  const int k_frame = m + 2;
  const Tower frame_tower(c, d.curve, d.frame, k_frame);
  const Tower curve_tower(c, d.curve, differentiate(std::span<const Expr>(d.curve.components), kParameterT),
                          k_frame + ell);
  TypedSample s = typed_sample(curve_tower.rows_at(t, k_frame + ell), m, t, tol);
  const auto fcols = frame_tower.rows_at(t, k_frame);
  const TypeSignature ft = type_signature(fcols, m, tol);
  if (frame_out) *frame_out = ft;
  if (ft.complete() && type_signature(fcols, m, tol / 10) == ft && type_signature(fcols, m, tol * 10) == ft) {
    s.shift_applicable = true;
    TypeSignature pred = ft;
    for (auto& e : pred.entries) e += ell;
    s.shift_match = pred.entries == s.type.entries;
  }
  return s;
}

}  // namespace

TrialReport directed_genericity_trial(const TrialOptions& o) {
  TrialReport r = trial_header(o, true);
  if (o.ell < 0 || o.ell > 3) throw Error(ErrorCode::InvalidArgument, "ell must lie in [0, 3]");
  const int m = o.m;
  const int ell = o.ell;
  r.generic_types = split_types(m == 3 ? "(1,2,3) (1,2,4) (2,3,4)"
                                       : type_list(m, {0, 1}) + shifted_type(m, 2).to_string());
  r.leading_type = shifted_type(m, 1 + ell).to_string();

  std::vector<std::vector<TypedSample>> results(static_cast<std::size_t>(o.curves));
  parallel_for(o.curves, o.threads, [&](int i) {
    auto rng = SplitMix64::stream(o.seed, static_cast<std::uint64_t>(i));
    const Connection c = o.connection ? *o.connection : random_connection(rng, m, true);
    const double t_star = rng.uniform(-0.5, 0.5);
    // Frame: resample until it stays away from zero on the interval.
    std::vector<Polynomial> u;
    for (int attempt = 0;; ++attempt) {
      u.clear();
      for (int k = 0; k < m; ++k) u.push_back(random_polynomial(rng, r.degree));
      double least = std::numeric_limits<double>::infinity();
      for (int j = 0; j <= 100; ++j) {
        const double t = -1.0 + 0.02 * j;
        double n2 = 0.0;
        for (const auto& p : u) n2 += p(t) * p(t);
        least = std::min(least, std::sqrt(n2));
      }
      if (least > 1e-2 || attempt == 20) break;
    }
    double b0 = rng.uniform(0.2, 1.0);
    if (rng.uniform(0.0, 1.0) < 0.5) b0 = -b0;
    const double b1 = rng.uniform(-0.5, 0.5);
    const Polynomial factor = power_about(t_star, ell) * Polynomial({b0 - b1 * t_star, b1});
    Vec q(m);
    for (int k = 0; k < m; ++k) q(k) = rng.uniform(-0.5, 0.5);
    const auto d = assemble_directed(m, u, factor, t_star, q);
    results[static_cast<std::size_t>(i)].push_back(directed_sample(c, d, m, ell, t_star, o.tol, nullptr));
  });
  tally(r, results);

  // Off the generic list on purpose: flat space, frame (1, s, ..., s^{m-2}, s^m).
  {
    const Connection flat(m);
    std::vector<Polynomial> u;
    for (int k = 0; k < m - 1; ++k) u.push_back(Polynomial::monomial(k));
    u.push_back(Polynomial::monomial(m));
    const auto d = assemble_directed(m, u, power_about(0.0, std::max(ell, 1)), 0.0, Vec::Zero(m));
    TypeSignature ft;
    const auto s = directed_sample(flat, d, m, std::max(ell, 1), 0.0, o.tol, &ft);
    ConstructedCheck cc;
    cc.frame_type = ft.to_string();
    cc.gamma_type = s.type.to_string();
    TypeSignature pred = ft;
    for (auto& e : pred.entries) e += std::max(ell, 1);
    cc.predicted = pred.to_string();
    cc.matches = s.shift_match;
    r.constructed = cc;
  }
  return r;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

namespace {

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(3);
  ss << x;
  return ss.str();
}

Connection degenerate_connection() {
  return Connection::from_table(3, {{"3,1,2", "x1 + x2^2"}, {"3,2,1", "x1 + x2^2"}});
}

// Coordinate jets from symbolic derivatives of the curve.
oracles::CurveJet curve_jet(const CurveSpec& curve, double t) {
  std::vector<Expr> all = curve.components;
  std::vector<Expr> d = curve.components;
  for (int k = 0; k < 3; ++k) {
    d = differentiate(std::span<const Expr>(d), kParameterT);
    all.insert(all.end(), d.begin(), d.end());
  }
  const auto v = Program(all).evaluate(Env{t, {}});
  const int m = curve.dimension();
  const auto block = [&](int k) {
    Vec x(m);
    for (int i = 0; i < m; ++i) x(i) = v[static_cast<std::size_t>(k * m + i)];
    return x;
  };
  return {block(0), block(1), block(2), block(3)};
}

VerifyCheck check_degenerate(double tol) {
  VerifyCheck c{"torsionless degenerate surface", false, {}};
  const auto conn = degenerate_connection();
  const auto curve = parse_curve({"-t^2", "t", "0"}, -1, 1);
  const TangentSurface surface(conn, curve);
  double dev = 0.0;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const double t = -1.0 + 0.1 * i, s = -1.0 + 0.1 * j;
      const Vec f = surface.evaluate(t, s);
      dev = std::max({dev, std::abs(f(0) + 2 * t * s + t * t), std::abs(f(1) - s - t),
                      std::abs(f(2) - t * std::pow(s, 4) / 3.0)});
    }
  ClassifyOptions o;
  o.tol = tol;
  const auto cls = classify_point(conn, curve, 0.3, o);
  const bool torsionless = torsionless_test(conn, curve, -1, 1, 21, tol).torsionless;
  const bool injective = cls.diagnostics && !cls.diagnostics->fold_like;
  c.passed = dev <= 1e-6 && torsionless && cls.kind == SingularityKind::DegeneratePsiZero && injective;
  c.detail = "surface deviation " + fmt(dev) + ", torsionless " + (torsionless ? "yes" : "no") + ", class " +
             to_string(cls.kind) + (cls.diagnostics ? ", " + cls.diagnostics->verdict() : "");
  return c;
}

VerifyCheck check_normal_forms(double tol) {
  VerifyCheck c{"flat normal forms", true, {}};
  struct Case {
    std::vector<std::string> curve;
    SingularityKind expected;
  };
  const std::vector<Case> cases = {{{"t", "t^2", "t^3"}, SingularityKind::CuspidalEdge},
                                   {{"t", "t^2", "t^4"}, SingularityKind::FoldedUmbrella},
                                   {{"t^2", "t^3", "t^4"}, SingularityKind::Swallowtail},
                                   {{"t^2", "t^3", "t^4", "t^5"}, SingularityKind::OpenSwallowtail}};
  ClassifyOptions o;
  o.tol = tol;
  for (const auto& k : cases) {
    const int m = static_cast<int>(k.curve.size());
    const auto curve = parse_curve(k.curve, -1, 1);
    const auto got = classify_point(Connection(m), curve, 0.0, o).kind;
    const auto psi = classify_via_psi(Connection(m), curve, 0.0, o).kind;
    c.passed = c.passed && got == k.expected && psi == k.expected;
    c.detail += (c.detail.empty() ? "" : "; ") + std::string(to_string(got)) + "/" + to_string(psi);
  }
  return c;
}

VerifyCheck check_identities() {
  VerifyCheck c{"characteristic field identities", false, {}};
  double worst_immersed = 0.0, worst_directed = 0.0;
  for (int i = 0; i < 10; ++i) {
    auto rng = SplitMix64::stream(7, static_cast<std::uint64_t>(i));
    const auto conn = random_connection(rng, 3, true);
    const auto curve = random_curve(rng, 3, 4);
    const double t = rng.uniform(-0.5, 0.5);
    const Vec tower = PointClassifier(conn, curve).characteristic_field(t);
    const Vec oracle = oracles::characteristic_field_immersed(conn, curve_jet(curve, t));
    worst_immersed = std::max(worst_immersed, (tower - oracle).cwiseAbs().maxCoeff());

    std::vector<Polynomial> u;
    for (int k = 0; k < 3; ++k) u.push_back(random_polynomial(rng, 3));
    const Polynomial factor({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    std::vector<Expr> gamma, frame;
    for (int k = 0; k < 3; ++k) {
      gamma.push_back((factor * u[static_cast<std::size_t>(k)]).integral(0.0, 0.0).to_expr());
      frame.push_back(u[static_cast<std::size_t>(k)].to_expr());
    }
    const auto d = make_directed(make_curve(gamma), frame, factor.to_expr());
    const Vec dtower = PointClassifier(conn, d).characteristic_field(t);
    Vec x(3), uu(3), du(3), ddu(3);
    for (int k = 0; k < 3; ++k) {
      const auto& p = u[static_cast<std::size_t>(k)];
      x(k) = (factor * p).integral(0.0, 0.0)(t);
      uu(k) = p(t);
      du(k) = p.derivative()(t);
      ddu(k) = p.derivative().derivative()(t);
    }
    const Vec doracle = oracles::characteristic_field_directed(conn, x, uu, du, ddu, factor(t),
                                                               factor.derivative()(t));
    worst_directed = std::max(worst_directed, (dtower - doracle).cwiseAbs().maxCoeff());
  }
  c.passed = worst_immersed <= 1e-9 && worst_directed <= 1e-9;
  c.detail = "max deviation immersed " + fmt(worst_immersed) + ", directed " + fmt(worst_directed);
  return c;
}

VerifyCheck check_symmetrization(double tol) {
  VerifyCheck c{"symmetrization invariance", true, {}};
  double worst = 0.0;
  ClassifyOptions o;
  o.tol = tol;
  o.diagnostics = false;
  for (int i = 0; i < 5; ++i) {
    auto rng = SplitMix64::stream(11, static_cast<std::uint64_t>(i));
    const auto conn = random_connection(rng, 3, false);
    const auto sym = conn.symmetrized();
    Vec x(3), v(3);
    for (int k = 0; k < 3; ++k) {
      x(k) = rng.uniform(-0.5, 0.5);
      v(k) = rng.uniform(-1, 1);
    }
    for (double s : {-0.5, 0.5}) {
      const Vec a = integrate_geodesic(conn, x, v, s).position;
      const Vec b = integrate_geodesic(sym, x, v, s).position;
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    const auto curve = random_curve(rng, 3, 4);
    const double t = rng.uniform(-0.5, 0.5);
    const auto k1 = classify_point(conn, curve, t, o);
    const auto k2 = classify_point(sym, curve, t, o);
    c.passed = c.passed && k1.kind == k2.kind && k1.signature == k2.signature;
  }
  c.passed = c.passed && worst <= 1e-8;
  c.detail = "max geodesic deviation " + fmt(worst);
  return c;
}

}  // namespace

VerifyReport verify(double tol) {
  VerifyReport r;
  const std::vector<std::function<VerifyCheck()>> checks = {
      [&] { return check_degenerate(tol); }, [&] { return check_normal_forms(tol); }, [] { return check_identities(); },
      [&] { return check_symmetrization(tol); }};
  for (const auto& run : checks) {
    try {
      r.checks.push_back(run());
    } catch (const Error& e) {
      r.checks.push_back({"check failed to run", false, e.what()});
    }
  }
  return r;
}

std::string to_json(const ClassifyReport& report) {
  ojson j;
  j["schema"] = kReportSchema;
  j["command"] = report.command;
  j["source"] = report.origin;
  ojson records = ojson::array();
  for (const auto& r : report.records) {
    ojson rec;
    rec["problem"] = r.problem;
    rec["t0"] = r.t0;
    if (report.command == "scan") rec["refined"] = r.refined;
    const ojson cls = class_json(r.cls);
    for (const auto& [k, v] : cls.items()) rec[k] = v;
    rec["psi_path"] = class_json(r.psi);
    rec["tolerances"] = {{"tol", r.cls.tolerance},
                         {"zero_below", r.cls.tolerance / 10.0},
                         {"nonzero_above", r.cls.tolerance * 10.0},
                         {"window", r.window}};
    rec["margin"] = {{"sensitive", r.margin_sensitive},
                     {"class_at_tol_over_10", to_string(r.kind_low_tol)},
                     {"class_at_tol_times_10", to_string(r.kind_high_tol)}};
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  j["unresolved"] = report.any_unresolved();
  return j.dump(2) + "\n";
}

std::string to_csv(const ClassifyReport& report) {
  std::string out =
      "problem,t0,class,type_signature,psi_class,tol,margin_sensitive,refined,verdict,reason,witnesses\n";
  for (const auto& r : report.records) {
    out += csv_field(r.problem) + "," + number(r.t0) + "," + to_string(r.cls.kind) + "," +
           csv_field(r.cls.signature.to_string()) + "," + to_string(r.psi.kind) + "," + number(r.cls.tolerance) +
           "," + (r.margin_sensitive ? "1" : "0") + "," + (r.refined ? "1" : "0") + "," +
           csv_field(r.cls.diagnostics ? r.cls.diagnostics->verdict() : "") + "," + csv_field(r.cls.reason) + "," +
           csv_field(witness_list(r.cls.witnesses)) + "\n";
  }
  return out;
}

std::string to_json(const std::vector<MeshReport>& reports) {
  ojson j;
  j["schema"] = kReportSchema;
  j["command"] = "mesh";
  ojson list = ojson::array();
  for (const auto& r : reports) {
    ojson m;
    m["problem"] = r.problem;
    m["grid"] = {r.nt, r.ns};
    m["vertices"] = r.vertices;
    m["quads"] = r.quads;
    m["holes"] = r.holes;
    if (r.reference_deviation) m["reference_deviation"] = *r.reference_deviation;
    m["off_curve_sign_change_rows"] = r.off_curve_rows;
    ojson rows = ojson::array();
    for (const auto& row : r.sign_changes) rows.push_back({{"t", row.t}, {"s", row.s}});
    m["sigma_sign_changes"] = std::move(rows);
    m["files"] = r.files;
    list.push_back(std::move(m));
  }
  j["meshes"] = std::move(list);
  return j.dump(2) + "\n";
}

std::string to_json(const TrialReport& r) {
  ojson j;
  j["schema"] = kReportSchema;
  j["command"] = r.directed ? "trial-directed" : "trial";
  j["m"] = r.m;
  j["curves"] = r.curves;
  j["points_per_curve"] = r.points;
  j["degree"] = r.degree;
  j["seed"] = r.seed;
  j["tol"] = r.tol;
  if (r.directed) j["ell"] = r.ell;
  j["samples"] = r.samples;
  j["resolved"] = r.resolved;
  j["band"] = r.band;
  j["counts"] = r.counts;
  j["generic_types"] = r.generic_types;
  j["leading_type"] = r.leading_type;
  j["leading_fraction"] = r.leading_fraction;
  j["off_generic"] = r.off_generic;
  ojson hits = ojson::array();
  for (const auto& h : r.hits)
    hits.push_back({{"sample", h.sample}, {"t", h.t}, {"type", h.type}, {"witnesses", witnesses_json(h.witnesses)}});
  j["off_generic_hits"] = std::move(hits);
  if (r.directed) {
    j["shift_checked"] = r.shift_checked;
    j["shift_matched"] = r.shift_matched;
    if (r.constructed)
      j["constructed"] = {{"frame_type", r.constructed->frame_type},
                          {"gamma_type", r.constructed->gamma_type},
                          {"predicted", r.constructed->predicted},
                          {"matches", r.constructed->matches}};
  }
  return j.dump(2) + "\n";
}

std::string to_csv(const TrialReport& r) {
  std::string out = "type,count\n";
  for (const auto& [k, v] : r.counts) out += csv_field(k) + "," + std::to_string(v) + "\n";
  return out;
}

std::string to_json(const VerifyReport& r) {
  ojson j;
  j["schema"] = kReportSchema;
  j["command"] = "verify";
  ojson list = ojson::array();
  for (const auto& c : r.checks) list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = std::move(list);
  j["passed"] = r.passed();
  return j.dump(2) + "\n";
}

std::string to_csv(const VerifyReport& r) {
  std::string out = "check,passed,detail\n";
  for (const auto& c : r.checks)
    out += csv_field(c.name) + "," + (c.passed ? "1" : "0") + "," + csv_field(c.detail) + "\n";
  return out;
}

}  // namespace ntan
