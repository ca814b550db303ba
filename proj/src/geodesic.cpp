#include "ntan/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "ntan/error.hpp"

namespace ntan {

namespace {

// State layout: [position (m), velocity (m)] optionally followed by
// [dposition (m), dvelocity (m)].
class GeodesicSystem {
 public:
  GeodesicSystem(const Connection& c, bool variation)
      : c_(c),
        m_(static_cast<std::size_t>(c.dimension())),
        variation_(variation),
        gamma_(m_ * m_ * m_),
        partials_(variation ? m_ * m_ * m_ * m_ : 0) {}

  std::size_t size() const { return variation_ ? 4 * m_ : 2 * m_; }

  void rhs(const std::vector<double>& y, std::vector<double>& dy) {
    const double* pos = y.data();
    const double* vel = y.data() + m_;
    c_.christoffel(std::span<const double>(pos, m_), gamma_);
    for (std::size_t i = 0; i < m_; ++i) dy[i] = vel[i];
    for (std::size_t l = 0; l < m_; ++l) {
      double acc = 0.0;
      const double* g = gamma_.data() + l * m_ * m_;
      for (std::size_t a = 0; a < m_; ++a) {
        double inner = 0.0;
        for (std::size_t b = 0; b < m_; ++b) inner += g[a * m_ + b] * vel[b];
        acc += inner * vel[a];
      }
      dy[m_ + l] = -acc;
    }
    if (!variation_) return;
    const double* dpos = y.data() + 2 * m_;
    const double* dvel = y.data() + 3 * m_;
    c_.christoffel_partials(std::span<const double>(pos, m_), partials_);
    for (std::size_t i = 0; i < m_; ++i) dy[2 * m_ + i] = dvel[i];
    for (std::size_t l = 0; l < m_; ++l) {
      double acc = 0.0;
      for (std::size_t a = 0; a < m_; ++a)
        for (std::size_t b = 0; b < m_; ++b) {
          const std::size_t i = (l * m_ + a) * m_ + b;
          double dg = 0.0;
          for (std::size_t k = 0; k < m_; ++k) dg += partials_[i * m_ + k] * dpos[k];
          acc += dg * vel[a] * vel[b] + gamma_[i] * (dvel[a] * vel[b] + vel[a] * dvel[b]);
        }
      dy[3 * m_ + l] = -acc;
    }
  }

 private:
  const Connection& c_;
  std::size_t m_;
  bool variation_;
  std::vector<double> gamma_;
  std::vector<double> partials_;
};

std::vector<double> rk4(GeodesicSystem& sys, std::vector<double> y, double s, int steps,
                        double bound) {
  const std::size_t n = sys.size();
  const double h = s / steps;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int step = 0; step < steps; ++step) {
    sys.rhs(y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    sys.rhs(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    sys.rhs(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    sys.rhs(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(y[i]) || std::abs(y[i]) > bound)
        throw Error(ErrorCode::GeodesicEscape, "geodesic left the evaluation domain");
    }
  }
  return y;
}

std::vector<double> integrate(GeodesicSystem& sys, std::vector<double> y0, double s,
                              std::size_t checked, const GeodesicOptions& opt) {
  if (s == 0.0) return y0;
  int steps = std::max(opt.min_steps, static_cast<int>(std::ceil(std::abs(s) / opt.max_step)));
  std::vector<double> coarse = rk4(sys, y0, s, steps, opt.escape_bound);
  for (int refinement = 0; refinement <= opt.max_refinements; ++refinement) {
    steps *= 2;
    std::vector<double> fine = rk4(sys, y0, s, steps, opt.escape_bound);
    double worst = 0.0;
    for (std::size_t i = 0; i < checked; ++i)
      worst = std::max(worst, std::abs(fine[i] - coarse[i]) / std::max(1.0, std::abs(fine[i])));
    if (worst <= opt.tolerance) return fine;
    coarse = std::move(fine);
  }
  throw Error(ErrorCode::IntegrationTolerance,
              "geodesic integration did not reach tolerance after step refinement");
}

void check_vector(const Connection& c, const Vec& v, const char* what) {
  if (v.size() != c.dimension())
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " has wrong dimension");
}

}  // namespace

GeodesicState integrate_geodesic(const Connection& c, const Vec& x, const Vec& v, double s,
                                 const GeodesicOptions& options) {
  check_vector(c, x, "point");
  check_vector(c, v, "velocity");
  const auto m = static_cast<std::size_t>(c.dimension());
  GeodesicSystem sys(c, false);
  std::vector<double> y(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    y[i] = x(static_cast<Eigen::Index>(i));
    y[m + i] = v(static_cast<Eigen::Index>(i));
  }
  const auto r = integrate(sys, std::move(y), s, 2 * m, options);
  GeodesicState out{Vec(c.dimension()), Vec(c.dimension())};
  for (std::size_t i = 0; i < m; ++i) {
    out.position(static_cast<Eigen::Index>(i)) = r[i];
    out.velocity(static_cast<Eigen::Index>(i)) = r[m + i];
  }
  return out;
}

GeodesicVariation integrate_geodesic_variation(const Connection& c, const Vec& x, const Vec& v,
                                               const Vec& dx, const Vec& dv, double s,
                                               const GeodesicOptions& options) {
  check_vector(c, x, "point");
  check_vector(c, v, "velocity");
  check_vector(c, dx, "point variation");
  check_vector(c, dv, "velocity variation");
  const auto m = static_cast<std::size_t>(c.dimension());
  GeodesicSystem sys(c, true);
  std::vector<double> y(4 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    y[i] = x(ii);
    y[m + i] = v(ii);
    y[2 * m + i] = dx(ii);
    y[3 * m + i] = dv(ii);
  }
  const auto r = integrate(sys, std::move(y), s, 4 * m, options);
  const Eigen::Index mm = c.dimension();
  GeodesicVariation out{{Vec(mm), Vec(mm)}, Vec(mm), Vec(mm)};
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.state.position(ii) = r[i];
    out.state.velocity(ii) = r[m + i];
    out.dposition(ii) = r[2 * m + i];
    out.dvelocity(ii) = r[3 * m + i];
  }
  return out;
}

GeodesicJet jet_coefficients(const Connection& c, const Vec& x, const Vec& v) {
  check_vector(c, x, "point");
  check_vector(c, v, "velocity");
  const int m = c.dimension();
  const auto mm = static_cast<std::size_t>(m);
  const std::vector<double> xs(x.data(), x.data() + m);
  const auto g = c.christoffel(xs);
  const auto dg = c.christoffel_partials(xs);
  const auto G = [&](int l, int a, int b) { return g[c.index(l, a, b)]; };
  const auto dG = [&](int l, int a, int b, int k) {
    return dg[c.index(l, a, b) * mm + static_cast<std::size_t>(k)];
  };

  GeodesicJet jet{Vec::Zero(m), Mat::Zero(m, m), Mat::Zero(m, m), Vec::Zero(m)};
  // q^r = Gamma^r_{mu nu} v^mu v^nu
  Vec q = Vec::Zero(m);
  for (int l = 0; l < m; ++l)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) q(l) += G(l, a, b) * v(a) * v(b);
  jet.h0 = -q;

  for (int l = 0; l < m; ++l) {
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) s += dG(l, a, b, k) * v(a) * v(b);
      jet.dh_dx(l, k) = -s;
    }
    for (int r = 0; r < m; ++r) {
      double s = 0.0;
      for (int n = 0; n < m; ++n) s += G(l, r, n) * v(n) + G(l, n, r) * v(n);
      jet.dh_dv(l, r) = -s;
    }
    double cubic = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int k = 0; k < m; ++k) cubic -= dG(l, a, b, k) * v(a) * v(b) * v(k);
    for (int r = 0; r < m; ++r)
      for (int k = 0; k < m; ++k) cubic += (G(l, r, k) + G(l, k, r)) * q(r) * v(k);
    jet.dh_ds(l) = cubic / 3.0;
  }
  return jet;
}

Vec series_approx(const GeodesicJet& jet, const Vec& x, const Vec& v, double s) {
  return x + s * v + 0.5 * s * s * (jet.h0 + s * jet.dh_ds);
}

}  // namespace ntan
