#pragma once

// Tangent surface f(t, s) = phi(gamma(t), u(t), s) of a directed curve, with its
// frontal frame (V1 = df/ds, F) and signed area density.  An immersed curve is
// the directed curve with u = gamma', c = 1.

#include <array>
#include <iosfwd>
#include <vector>

#include "ntan/connection.hpp"
#include "ntan/covariant.hpp"
#include "ntan/geodesic.hpp"
#include "ntan/linalg.hpp"

namespace ntan {

struct CurveSample {
  Vec gamma;
  Vec velocity;  // gamma'
  Vec frame;     // u
  Vec frame_dt;  // u'
  double factor = 0.0;     // c
  double factor_dt = 0.0;  // c'
};

struct SurfacePartials {
  Vec f;
  Vec df_dt;
  Vec df_ds;
};

// Kernel field eta = d/dt + eta_s d/ds with eta_s = -c(t).
struct FrontalFrameSample {
  Vec v1;
  Vec F;
  double eta_s = 0.0;
};

class TangentSurface {
 public:
  TangentSurface(const Connection& c, const CurveSpec& curve, const GeodesicOptions& options = {});
  TangentSurface(const Connection& c, DirectedCurveSpec directed,
                 const GeodesicOptions& options = {});

  const Connection& connection() const noexcept { return c_; }
  const DirectedCurveSpec& directed() const noexcept { return d_; }
  const GeodesicOptions& geodesic_options() const noexcept { return options_; }
  int dimension() const noexcept { return c_.dimension(); }
  // Rows u, nabla u, nabla^2 u, nabla^3 u along the curve.
  const Tower& frame_tower() const noexcept { return tower_; }

  CurveSample curve_at(double t) const;

  Vec evaluate(double t, double s) const;
  // df/dt from the linearized geodesic equation, df/ds from the integration
  // velocity.
  SurfacePartials partials(double t, double s) const;

  // F(t, s) = (df/dt - c df/ds) / s.  At s = 0 this is nabla u from the frame
  // tower; for |s| < 1e-3 the second-order jet expansion replaces the quotient.
  Vec frame_F(double t, double s) const;
  FrontalFrameSample frontal_frame_at(double t, double s) const;

  // sigma with df/dt ^ df/ds = sigma (V1 ^ F), least squares over bivector
  // coordinates.  Equals -s for this frame.  Throws FrameDegenerate when
  // V1 ^ F vanishes.
  double s_function(double t, double s) const;

 private:
  Connection c_;
  DirectedCurveSpec d_;
  GeodesicOptions options_;
  Tower tower_;
  Program program_;  // gamma, gamma', u, u', c, c'
};

// <a ^ b, c ^ d> = (a.c)(b.d) - (a.d)(b.c)
double bivector_dot(const Vec& a, const Vec& b, const Vec& c, const Vec& d);

struct MeshOptions {
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

// Row-major grid, s fastest: vertex (i, j) sits at index i * ns + j.
struct SurfaceMesh {
  int dimension = 0;
  int nt = 0;
  int ns = 0;
  std::vector<double> t;
  std::vector<double> s;
  std::vector<Vec> vertices;
  // Signed area |df/dt ^ df/ds| / |u ^ nabla u|, oriented by (u, nabla u)
  // near s = 0 and by continuity along each row, so that folds away from
  // s = 0 show up as sign changes.  NaN where unknown.
  std::vector<double> sigma;
  std::vector<char> valid;
  std::vector<std::array<int, 4>> quads;

  int index(int i, int j) const noexcept { return i * ns + j; }
  int holes() const;
};

SurfaceMesh build_mesh(const TangentSurface& surface, std::array<double, 2> t_range,
                       std::array<double, 2> s_range, int nt, int ns,
                       const MeshOptions& options = {});

// One v line per valid grid vertex (first three coordinates, zero padded) in
// row-major order; holes are omitted along with every quad touching them.
void write_obj(const SurfaceMesh& mesh, std::ostream& out);
// Header t,s,x1..xm,sigma; one row per vertex, nan for holes.
void write_csv(const SurfaceMesh& mesh, std::ostream& out);

}  // namespace ntan
