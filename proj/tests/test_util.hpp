#pragma once

#include <cmath>
#include <functional>

#include "ntan/linalg.hpp"

namespace test_util {

inline double max_abs(const ntan::Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// 5-point central difference of a vector valued function.
inline ntan::Vec central_diff(const std::function<ntan::Vec(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

inline ntan::Vec vec(std::initializer_list<double> xs) {
  ntan::Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace test_util
