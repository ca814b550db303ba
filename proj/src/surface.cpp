#include "ntan/surface.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include "ntan/error.hpp"

namespace ntan {

namespace {

constexpr double kSeriesRadius = 1e-3;

std::vector<Expr> program_outputs(const DirectedCurveSpec& d) {
  const auto& g = d.curve.components;
  const auto dg = differentiate(std::span<const Expr>(g), kParameterT);
  const auto du = differentiate(std::span<const Expr>(d.frame), kParameterT);
  std::vector<Expr> out = g;
  out.insert(out.end(), dg.begin(), dg.end());
  out.insert(out.end(), d.frame.begin(), d.frame.end());
  out.insert(out.end(), du.begin(), du.end());
  out.push_back(d.factor);
  out.push_back(differentiate(d.factor, kParameterT));
  return out;
}

std::string format(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

double bivector_dot(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  return a.dot(c) * b.dot(d) - a.dot(d) * b.dot(c);
}

TangentSurface::TangentSurface(const Connection& c, const CurveSpec& curve,
                               const GeodesicOptions& options)
    : TangentSurface(c, immersed_frame(curve), options) {}

TangentSurface::TangentSurface(const Connection& c, DirectedCurveSpec directed,
                               const GeodesicOptions& options)
    : c_(c),
      d_(std::move(directed)),
      options_(options),
      tower_(c_, d_.curve, d_.frame, 4),
      program_(program_outputs(d_)) {}

CurveSample TangentSurface::curve_at(double t) const {
  const int m = dimension();
  std::vector<double> out(program_.outputs());
  program_.evaluate(Env{t, {}}, out);
  const auto block = [&](int k) {
    Vec v(m);
    for (int i = 0; i < m; ++i) v(i) = out[static_cast<std::size_t>(k * m + i)];
    return v;
  };
  const auto n = static_cast<std::size_t>(4 * m);
  return CurveSample{block(0), block(1), block(2), block(3), out[n], out[n + 1]};
}

Vec TangentSurface::evaluate(double t, double s) const {
  const auto cs = curve_at(t);
  return integrate_geodesic(c_, cs.gamma, cs.frame, s, options_).position;
}

SurfacePartials TangentSurface::partials(double t, double s) const {
  const auto cs = curve_at(t);
  const auto r =
      integrate_geodesic_variation(c_, cs.gamma, cs.frame, cs.velocity, cs.frame_dt, s, options_);
  return SurfacePartials{r.state.position, r.dposition, r.state.velocity};
}

Vec TangentSurface::frame_F(double t, double s) const {
  if (s == 0.0) return tower_.row(1, t);
  const auto cs = curve_at(t);
  if (std::abs(s) < kSeriesRadius) {
    const auto jet = jet_coefficients(c_, cs.gamma, cs.frame);
    return cs.frame_dt - cs.factor * jet.h0 +
           s * (0.5 * jet.dh_dx * cs.velocity + 0.5 * jet.dh_dv * cs.frame_dt -
                1.5 * cs.factor * jet.dh_ds);
  }
  const auto r =
      integrate_geodesic_variation(c_, cs.gamma, cs.frame, cs.velocity, cs.frame_dt, s, options_);
  return (r.dposition - cs.factor * r.state.velocity) / s;
}

FrontalFrameSample TangentSurface::frontal_frame_at(double t, double s) const {
  const auto cs = curve_at(t);
  Vec v1 = cs.frame;
  if (s != 0.0) v1 = integrate_geodesic(c_, cs.gamma, cs.frame, s, options_).velocity;
  return FrontalFrameSample{std::move(v1), frame_F(t, s), -cs.factor};
}

double TangentSurface::s_function(double t, double s) const {
  const auto p = partials(t, s);
  const Vec F = frame_F(t, s);
  const double bb = bivector_dot(p.df_ds, F, p.df_ds, F);
  const double scale = p.df_ds.squaredNorm() * F.squaredNorm();
  if (!(scale > 0.0) || bb <= 1e-16 * scale)
    throw Error(ErrorCode::FrameDegenerate, "frontal frame is degenerate at this point");
  return bivector_dot(p.df_dt, p.df_ds, p.df_ds, F) / bb;
}

int SurfaceMesh::holes() const {
  return static_cast<int>(std::count(valid.begin(), valid.end(), 0));
}

SurfaceMesh build_mesh(const TangentSurface& surface, std::array<double, 2> t_range,
                       std::array<double, 2> s_range, int nt, int ns, const MeshOptions& options) {
  if (nt < 2 || ns < 2) throw Error(ErrorCode::InvalidArgument, "mesh needs at least 2x2 vertices");
  SurfaceMesh mesh;
  mesh.dimension = surface.dimension();
  mesh.nt = nt;
  mesh.ns = ns;
  for (int i = 0; i < nt; ++i) mesh.t.push_back(t_range[0] + (t_range[1] - t_range[0]) * i / (nt - 1));
  for (int j = 0; j < ns; ++j) mesh.s.push_back(s_range[0] + (s_range[1] - s_range[0]) * j / (ns - 1));
  const auto total = static_cast<std::size_t>(nt) * static_cast<std::size_t>(ns);
  mesh.vertices.assign(total, Vec::Zero(mesh.dimension));
  mesh.sigma.assign(total, std::numeric_limits<double>::quiet_NaN());
  mesh.valid.assign(total, 0);

  const auto& c = surface.connection();
  GeodesicOptions step_options = surface.geodesic_options();
  step_options.min_steps = 4;
  std::size_t j0 = 0;
  for (std::size_t j = 1; j < mesh.s.size(); ++j)
    if (std::abs(mesh.s[j]) < std::abs(mesh.s[j0])) j0 = j;

  // Each row is integrated outward from the sample nearest s = 0, continuing
  // the linearized state from one sample to the next.  The orientation of
  // df/dt ^ df/ds is anchored to (u, nabla u) there and carried along by
  // comparing consecutive bivectors, so sigma changes sign only where the
  // bivector passes through zero.
  const auto do_row = [&](int i) {
    const double t = mesh.t[static_cast<std::size_t>(i)];
    CurveSample cs;
    Vec reference_F;
    try {
      cs = surface.curve_at(t);
      reference_F = surface.frame_tower().row(1, t);
    } catch (const Error&) {
      return;
    }
    const double rr = bivector_dot(cs.frame, reference_F, cs.frame, reference_F);
    const bool anchored = rr > 1e-16 * cs.frame.squaredNorm() * reference_F.squaredNorm();
    std::vector<GeodesicVariation> state(static_cast<std::size_t>(ns));

    const auto store = [&](std::size_t j, const GeodesicVariation& r, std::optional<std::size_t> prev) {
      const auto k = static_cast<std::size_t>(mesh.index(i, static_cast<int>(j)));
      mesh.vertices[k] = r.state.position;
      mesh.valid[k] = 1;
      state[j] = r;
      if (!anchored) return;
      const Vec& ft = r.dposition;
      const Vec& fs = r.state.velocity;
      const double magnitude = std::sqrt(std::max(0.0, bivector_dot(ft, fs, ft, fs)) / rr);
      double sign = 0.0;
      const double to_ref = bivector_dot(ft, fs, cs.frame, reference_F);
      if (prev) {
        const auto kp = static_cast<std::size_t>(mesh.index(i, static_cast<int>(*prev)));
        const double sp = mesh.sigma[kp];
        const auto& q = state[*prev];
        if (sp != 0.0 && !std::isnan(sp)) {
          const double overlap = bivector_dot(ft, fs, q.dposition, q.state.velocity);
          sign = (sp > 0.0) == (overlap >= 0.0) ? 1.0 : -1.0;
        }
      }
      if (sign == 0.0) sign = to_ref > 0.0 ? 1.0 : to_ref < 0.0 ? -1.0 : 0.0;
      mesh.sigma[k] = sign * magnitude;
    };

    try {
      store(j0,
            integrate_geodesic_variation(c, cs.gamma, cs.frame, cs.velocity, cs.frame_dt, mesh.s[j0],
                                         surface.geodesic_options()),
            std::nullopt);
    } catch (const Error&) {
      return;
    }
    for (int dir : {1, -1}) {
      std::size_t prev = j0;
      for (auto j = static_cast<std::ptrdiff_t>(j0) + dir; j >= 0 && j < ns; j += dir) {
        const auto ju = static_cast<std::size_t>(j);
        const auto& p = state[prev];
        try {
          store(ju,
                integrate_geodesic_variation(c, p.state.position, p.state.velocity, p.dposition, p.dvelocity,
                                             mesh.s[ju] - mesh.s[prev], step_options),
                prev);
        } catch (const Error&) {
          break;  // beyond an escape the row stays a hole
        }
        prev = ju;
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, static_cast<unsigned>(nt));
  if (threads == 1) {
    for (int i = 0; i < nt; ++i) do_row(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < nt; i = next++) do_row(i);
      });
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i + 1 < nt; ++i)
    for (int j = 0; j + 1 < ns; ++j) {
      const std::array<int, 4> q{mesh.index(i, j), mesh.index(i, j + 1), mesh.index(i + 1, j + 1),
                                 mesh.index(i + 1, j)};
      if (std::all_of(q.begin(), q.end(), [&](int k) { return mesh.valid[static_cast<std::size_t>(k)]; }))
        mesh.quads.push_back(q);
    }
  return mesh;
}

void write_obj(const SurfaceMesh& mesh, std::ostream& out) {
  out << "# tangent surface " << mesh.nt << " x " << mesh.ns << ", dimension " << mesh.dimension << ", "
      << mesh.holes() << " holes\n";
  // OBJ indices of the valid vertices; holes are left out.
  std::vector<int> number(mesh.vertices.size(), 0);
  int next = 0;
  for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
    if (!mesh.valid[k]) continue;
    number[k] = ++next;
    out << 'v';
    for (int i = 0; i < 3; ++i) out << ' ' << format(i < mesh.dimension ? mesh.vertices[k](i) : 0.0);
    out << '\n';
  }
  for (const auto& q : mesh.quads) {
    out << 'f';
    for (int v : q) out << ' ' << number[static_cast<std::size_t>(v)];
    out << '\n';
  }
}

void write_csv(const SurfaceMesh& mesh, std::ostream& out) {
  out << "t,s";
  for (int i = 1; i <= mesh.dimension; ++i) out << ",x" << i;
  out << ",sigma\n";
  for (int i = 0; i < mesh.nt; ++i)
    for (int j = 0; j < mesh.ns; ++j) {
      const auto k = static_cast<std::size_t>(mesh.index(i, j));
      out << format(mesh.t[static_cast<std::size_t>(i)]) << ',' << format(mesh.s[static_cast<std::size_t>(j)]);
      for (int d = 0; d < mesh.dimension; ++d)
        out << ',' << (mesh.valid[k] ? format(mesh.vertices[k](d)) : std::string("nan"));
      out << ',' << format(mesh.sigma[k]) << '\n';
    }
}

}  // namespace ntan
