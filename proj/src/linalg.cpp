#include "ntan/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ntan/error.hpp"

namespace ntan {

Mat normalized_columns(std::span<const Vec> columns) {
  if (columns.empty()) return Mat();
  const auto rows = columns.front().size();
  Mat a(rows, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const double scale = std::max(1.0, columns[j].norm());
    a.col(static_cast<Eigen::Index>(j)) = columns[j] / scale;
  }
  return a;
}

Vec singular_values(const Mat& a) {
  if (a.size() == 0) return Vec();
  return Eigen::JacobiSVD<Mat>(a).singularValues();
}

double independence_witness(std::span<const Vec> columns) {
  if (columns.empty()) return 1.0;
  if (static_cast<Eigen::Index>(columns.size()) > columns.front().size()) return 0.0;
  const Vec sv = singular_values(normalized_columns(columns));
  return sv(sv.size() - 1) / std::max(1.0, sv(0));
}

int numerical_rank(const Mat& a, double tol, double scale) {
  const Vec sv = singular_values(a);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * scale) ++rank;
  return rank;
}

std::vector<Vec> orthonormal_complement(const Vec& a, const Vec& b, std::vector<int>& pivots) {
  const auto m = static_cast<int>(a.size());
  std::vector<Vec> basis;
  const double na = a.norm();
  if (na == 0.0) throw Error(ErrorCode::FrameDegenerate, "frame vector vanishes");
  basis.push_back(a / na);
  Vec rb = b - basis[0].dot(b) * basis[0];
  const double nb = rb.norm();
  if (nb <= 1e-14 * std::max(1.0, b.norm()))
    throw Error(ErrorCode::FrameDegenerate, "frame vectors are dependent");
  basis.push_back(rb / nb);

  auto reject = [&](Vec v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    return v;
  };

  const bool choose = pivots.empty();
  std::vector<Vec> out;
  for (int i = 0; i < m - 2; ++i) {
    Vec best;
    if (choose) {
      int best_axis = -1;
      double best_norm = -1.0;
      for (int axis = 0; axis < m; ++axis) {
        if (std::find(pivots.begin(), pivots.end(), axis) != pivots.end()) continue;
        const Vec r = reject(Vec::Unit(m, axis));
        if (r.norm() > best_norm) {
          best_norm = r.norm();
          best_axis = axis;
          best = r;
        }
      }
      pivots.push_back(best_axis);
    } else {
      best = reject(Vec::Unit(m, pivots.at(static_cast<std::size_t>(i))));
    }
    const double n = best.norm();
    if (n <= 1e-12) throw Error(ErrorCode::FrameDegenerate, "coframe seed collapsed");
    best /= n;
    basis.push_back(best);
    out.push_back(best);
  }
  return out;
}

}  // namespace ntan
