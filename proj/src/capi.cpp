#include "ntan/ntan.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "ntan/classify.hpp"
#include "ntan/error.hpp"
#include "ntan/geodesic.hpp"
#include "ntan/harness.hpp"
#include "ntan/surface.hpp"

struct ntan_connection {
  ntan::Connection value;
};

struct ntan_curve {
  ntan::DirectedCurveSpec value;
  bool directed = false;
};

struct ntan_surface {
  ntan::TangentSurface value;
};

namespace {

thread_local std::string last_error;

ntan_status status_of(ntan::ErrorCode code) { return static_cast<ntan_status>(static_cast<int>(code)); }

ntan_status fail(ntan_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
ntan_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return NTAN_OK;
  } catch (const ntan::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NTAN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NTAN_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw ntan::Error(ntan::ErrorCode::InvalidArgument, what);
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::vector<std::string> strings(const char* const* items, std::size_t n, const char* what) {
  require(items != nullptr, what);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    require(items[i] != nullptr, what);
    out.emplace_back(items[i]);
  }
  return out;
}

void fill_result(const ntan::SingularityClass& c, int m, ntan_class_result* out) {
  std::memset(out, 0, sizeof *out);
  out->kind = static_cast<ntan_kind>(static_cast<int>(c.kind));
  out->dimension = m;
  out->type_length = static_cast<int>(c.signature.entries.size());
  for (int i = 0; i < out->type_length && i < NTAN_MAX_DIMENSION; ++i)
    out->type[i] = c.signature.entries[static_cast<std::size_t>(i)];
  out->tolerance = c.tolerance;
  std::strncpy(out->reason, c.reason.c_str(), sizeof out->reason - 1);
}

ntan::ClassifyOptions classify_options(double tol, bool diagnostics) {
  ntan::ClassifyOptions o;
  if (tol > 0.0) o.tol = tol;
  o.diagnostics = diagnostics;
  return o;
}

ntan::RunOptions run_options(const ntan_run_options* o) {
  ntan::RunOptions r;
  if (!o) return r;
  if (o->tol > 0.0) r.tol = o->tol;
  if (o->window > 0.0) r.window = o->window;
  r.threads = o->threads;
  r.margin_check = o->margin_check != 0;
  return r;
}

std::string format_of(const char* f) {
  const std::string s = f ? f : "json";
  require(s == "json" || s == "csv", "format must be \"json\" or \"csv\"");
  return s;
}

template <class Report>
void emit(const Report& r, const std::string& format, char** report) {
  *report = copy_string(format == "csv" ? ntan::to_csv(r) : ntan::to_json(r));
}

}  // namespace

extern "C" {

uint32_t ntan_abi_version(void) { return NTAN_ABI_VERSION; }

const char* ntan_version_string(void) { return NTAN_VERSION; }

const char* ntan_status_name(ntan_status status) {
  if (status == NTAN_OK) return "ok";
  if (status == NTAN_ERR_INTERNAL) return "internal";
  if (status >= NTAN_ERR_PARSE && status <= NTAN_ERR_IO) return ntan::to_string(static_cast<ntan::ErrorCode>(status));
  return "unknown";
}

const char* ntan_kind_name(ntan_kind kind) {
  if (kind < NTAN_REGULAR || kind > NTAN_UNRESOLVED) return "unknown";
  return ntan::to_string(static_cast<ntan::SingularityKind>(kind));
}

const char* ntan_last_error(void) { return last_error.c_str(); }

void ntan_string_free(char* s) { std::free(s); }

ntan_status ntan_connection_flat(int m, ntan_connection** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new ntan_connection{ntan::Connection(m)};
  });
}

ntan_status ntan_connection_from_table(int m, const char* const* keys, const char* const* exprs, size_t count,
                                       ntan_connection** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    std::map<std::string, std::string> table;
    if (count > 0) {
      const auto k = strings(keys, count, "keys are null");
      const auto e = strings(exprs, count, "expressions are null");
      for (std::size_t i = 0; i < count; ++i) table[k[i]] = e[i];
    }
    *out = new ntan_connection{ntan::Connection::from_table(m, table)};
  });
}

ntan_status ntan_connection_from_metric(int m, const char* const* metric, ntan_connection** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(m >= 1 && m <= NTAN_MAX_DIMENSION, "dimension out of range");
    std::vector<ntan::Expr> g;
    ntan::ParseOptions po;
    po.dimension = m;
    po.allow_t = false;
    for (const auto& s : strings(metric, static_cast<std::size_t>(m * m), "metric is null"))
      g.push_back(ntan::parse(s, po));
    *out = new ntan_connection{ntan::levi_civita(m, std::move(g))};
  });
}

ntan_status ntan_connection_symmetrized(const ntan_connection* c, ntan_connection** out) {
  return guarded([&] {
    require(c && out, "null argument");
    *out = new ntan_connection{c->value.symmetrized()};
  });
}

void ntan_connection_free(ntan_connection* c) { delete c; }

int ntan_connection_dimension(const ntan_connection* c) { return c ? c->value.dimension() : 0; }

ntan_status ntan_connection_christoffel(const ntan_connection* c, const double* x, double* out) {
  return guarded([&] {
    require(c && x && out, "null argument");
    const auto m = static_cast<std::size_t>(c->value.dimension());
    c->value.christoffel(std::span<const double>(x, m), std::span<double>(out, m * m * m));
  });
}

ntan_status ntan_curve_create(int m, const char* const* components, double t_lo, double t_hi, ntan_curve** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(m >= 1 && m <= NTAN_MAX_DIMENSION, "dimension out of range");
    const auto curve = ntan::parse_curve(strings(components, static_cast<std::size_t>(m), "components are null"),
                                         t_lo, t_hi);
    *out = new ntan_curve{ntan::immersed_frame(curve), false};
  });
}

ntan_status ntan_curve_create_directed(int m, const char* const* components, const char* const* frame,
                                       const char* factor, double t_lo, double t_hi, ntan_curve** out) {
  return guarded([&] {
    require(out != nullptr && factor != nullptr, "null argument");
    require(m >= 1 && m <= NTAN_MAX_DIMENSION, "dimension out of range");
    const auto n = static_cast<std::size_t>(m);
    auto curve = ntan::parse_curve(strings(components, n, "components are null"), t_lo, t_hi);
    ntan::ParseOptions po;
    po.allow_space = false;
    std::vector<ntan::Expr> u;
    for (const auto& s : strings(frame, n, "frame is null")) u.push_back(ntan::parse(s, po));
    *out = new ntan_curve{ntan::make_directed(std::move(curve), std::move(u), ntan::parse(factor, po)), true};
  });
}

void ntan_curve_free(ntan_curve* curve) { delete curve; }

ntan_status ntan_geodesic(const ntan_connection* c, const double* x, const double* v, double s, double* position,
                          double* velocity) {
  return guarded([&] {
    require(c && x && v, "null argument");
    const int m = c->value.dimension();
    const auto r = ntan::integrate_geodesic(c->value, Eigen::Map<const ntan::Vec>(x, m),
                                            Eigen::Map<const ntan::Vec>(v, m), s);
    if (position) Eigen::Map<ntan::Vec>(position, m) = r.position;
    if (velocity) Eigen::Map<ntan::Vec>(velocity, m) = r.velocity;
  });
}

ntan_status ntan_covariant_tower(const ntan_connection* c, const ntan_curve* curve, double t, int k, double* out) {
  return guarded([&] {
    require(c && curve && out, "null argument");
    require(k >= 1, "k must be positive");
    const int m = c->value.dimension();
    require(curve->value.curve.dimension() == m, "curve and connection dimensions differ");
    const auto& comps = curve->value.curve.components;
    const ntan::Tower tower(c->value, curve->value.curve,
                            ntan::differentiate(std::span<const ntan::Expr>(comps), ntan::kParameterT), k);
    const auto cols = tower.rows_at(t, k);
    for (int j = 0; j < k; ++j) Eigen::Map<ntan::Vec>(out + static_cast<std::ptrdiff_t>(j) * m, m) = cols[static_cast<std::size_t>(j)];
  });
}

ntan_status ntan_classify(const ntan_connection* c, const ntan_curve* curve, double t0, double tol, int diagnostics,
                          ntan_class_result* out) {
  return guarded([&] {
    require(c && curve && out, "null argument");
    require(curve->value.curve.dimension() == c->value.dimension(), "curve and connection dimensions differ");
    const auto r = ntan::classify_point(c->value, curve->value, t0, classify_options(tol, diagnostics != 0));
    fill_result(r, c->value.dimension(), out);
  });
}

ntan_status ntan_classify_via_psi(const ntan_connection* c, const ntan_curve* curve, double t0, double tol,
                                  ntan_class_result* out) {
  return guarded([&] {
    require(c && curve && out, "null argument");
    require(curve->value.curve.dimension() == c->value.dimension(), "curve and connection dimensions differ");
    const auto o = classify_options(tol, false);
    const auto r = curve->directed ? ntan::classify_via_psi(c->value, curve->value, t0, o)
                                   : ntan::classify_via_psi(c->value, curve->value.curve, t0, o);
    fill_result(r, c->value.dimension(), out);
  });
}

ntan_status ntan_torsionless(const ntan_connection* c, const ntan_curve* curve, double t_lo, double t_hi,
                             int n_probe, double tol, int* out) {
  return guarded([&] {
    require(c && curve && out, "null argument");
    require(n_probe >= 1, "n_probe must be positive");
    const auto r = ntan::torsionless_test(c->value, curve->value.curve, t_lo, t_hi, n_probe, tol > 0 ? tol : 1e-8);
    *out = r.torsionless ? 1 : 0;
  });
}

ntan_status ntan_surface_create(const ntan_connection* c, const ntan_curve* curve, ntan_surface** out) {
  return guarded([&] {
    require(c && curve && out, "null argument");
    require(curve->value.curve.dimension() == c->value.dimension(), "curve and connection dimensions differ");
    *out = new ntan_surface{ntan::TangentSurface(c->value, curve->value)};
  });
}

void ntan_surface_free(ntan_surface* surface) { delete surface; }

ntan_status ntan_surface_evaluate(const ntan_surface* surface, double t, double s, double* out) {
  return guarded([&] {
    require(surface && out, "null argument");
    const auto f = surface->value.evaluate(t, s);
    Eigen::Map<ntan::Vec>(out, f.size()) = f;
  });
}

void ntan_run_options_init(ntan_run_options* options) {
  if (!options) return;
  options->tol = 0.0;
  options->window = 0.0;
  options->threads = 0;
  options->margin_check = 1;
  options->format = "json";
  options->out_dir = ".";
}

ntan_status ntan_run_classify(const char* problem_path, const ntan_run_options* options, char** report,
                              int* exit_code) {
  return guarded([&] {
    require(problem_path && report && exit_code, "null argument");
    const auto format = format_of(options ? options->format : nullptr);
    const auto r = ntan::run_classify(ntan::load_problem_file(problem_path), run_options(options));
    emit(r, format, report);
    *exit_code = r.exit_code();
  });
}

ntan_status ntan_run_scan(const char* problem_path, const ntan_run_options* options, char** report,
                          int* exit_code) {
  return guarded([&] {
    require(problem_path && report && exit_code, "null argument");
    const auto format = format_of(options ? options->format : nullptr);
    const auto r = ntan::run_scan(ntan::load_problem_file(problem_path), run_options(options));
    emit(r, format, report);
    *exit_code = r.exit_code();
  });
}

ntan_status ntan_run_mesh(const char* problem_path, const ntan_run_options* options, char** report,
                          int* exit_code) {
  return guarded([&] {
    require(problem_path && report && exit_code, "null argument");
    const auto format = format_of(options ? options->format : nullptr);
    const std::string dir = options && options->out_dir ? options->out_dir : ".";
    const auto file = ntan::load_problem_file(problem_path);
    const auto r = ntan::run_mesh(file, dir, format, run_options(options));
    if (r.empty()) throw ntan::Error(ntan::ErrorCode::Validation, problem_path + std::string(": no problem has grid parameters"));
    *report = copy_string(ntan::to_json(r));
    *exit_code = ntan::kExitOk;
  });
}

void ntan_trial_options_init(ntan_trial_options* options) {
  if (!options) return;
  const ntan::TrialOptions d;
  options->m = d.m;
  options->curves = d.curves;
  options->points = d.points;
  options->degree = d.degree;
  options->seed = d.seed;
  options->tol = d.tol;
  options->directed = 0;
  options->ell = d.ell;
  options->threads = d.threads;
}

ntan_status ntan_run_trial(const ntan_trial_options* options, const char* format, char** report, int* exit_code) {
  return guarded([&] {
    require(options && report && exit_code, "null argument");
    const auto fmt = format_of(format);
    ntan::TrialOptions o;
    o.m = options->m;
    o.curves = options->curves;
    o.points = options->points;
    o.degree = options->degree;
    o.seed = options->seed;
    o.tol = options->tol > 0 ? options->tol : 1e-8;
    o.ell = options->ell;
    o.threads = options->threads;
    const auto r = options->directed ? ntan::directed_genericity_trial(o) : ntan::genericity_trial(o);
    emit(r, fmt, report);
    *exit_code = r.band > 0 ? ntan::kExitUnresolved : ntan::kExitOk;
  });
}

ntan_status ntan_run_verify(double tol, const char* format, char** report, int* exit_code) {
  return guarded([&] {
    require(report && exit_code, "null argument");
    const auto fmt = format_of(format);
    const auto r = ntan::verify(tol > 0 ? tol : 1e-8);
    emit(r, fmt, report);
    *exit_code = r.passed() ? ntan::kExitOk : ntan::kExitError;
  });
}

}  // extern "C"
