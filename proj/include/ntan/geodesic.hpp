#pragma once

// Geodesics phi(x, v, s) of an affine connection:
//   d^2 phi^l / ds^2 + Gamma^l_{mu nu}(phi) dphi^mu/ds dphi^nu/ds = 0,
//   phi(x, v, 0) = x,  dphi/ds(x, v, 0) = v.

#include "ntan/connection.hpp"
#include "ntan/linalg.hpp"

namespace ntan {

struct GeodesicOptions {
  int min_steps = 64;
  double max_step = 0.01;
  double tolerance = 1e-9;  // step-doubling discrepancy, relative to max(1, |y|)
  int max_refinements = 4;
  double escape_bound = 1e6;
};

struct GeodesicState {
  Vec position;
  Vec velocity;
};

// A geodesic together with its derivative along a variation (dx, dv) of the
// initial data, integrated from the linearized equation on the same steps.
struct GeodesicVariation {
  GeodesicState state;
  Vec dposition;
  Vec dvelocity;
};

// phi(x, v, s) = x + s v + s^2 h(x, v, s) / 2; the jet holds h and its first
// partials at s = 0.
struct GeodesicJet {
  Vec h0;     // -Gamma^l_{mu nu}(x) v^mu v^nu
  Mat dh_dx;  // (l, k): -Gamma^l_{mu nu,k} v^mu v^nu
  Mat dh_dv;  // (l, r): -Gamma^l_{r nu} v^nu - Gamma^l_{mu r} v^mu
  Vec dh_ds;  // third s-derivative of phi at 0, divided by 3
};

// Classical RK4 with N = max(min_steps, ceil(|s| / max_step)) steps, checked
// against 2N steps; the step count is doubled until the two agree.
// Throws GeodesicEscape on blow-up and IntegrationTolerance when refinement
// is exhausted.
GeodesicState integrate_geodesic(const Connection& c, const Vec& x, const Vec& v, double s,
                                 const GeodesicOptions& options = {});

GeodesicVariation integrate_geodesic_variation(const Connection& c, const Vec& x, const Vec& v,
                                               const Vec& dx, const Vec& dv, double s,
                                               const GeodesicOptions& options = {});

GeodesicJet jet_coefficients(const Connection& c, const Vec& x, const Vec& v);

// x + s v + s^2 (h0 + s dh_ds) / 2
Vec series_approx(const GeodesicJet& jet, const Vec& x, const Vec& v, double s);

}  // namespace ntan
