#pragma once

// Small dense linear algebra on tangent vectors: numerical rank, independence
// witnesses and annihilating coframes.

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace ntan {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Columns scaled by 1 / max(1, |col|), so that factorial growth in high
// derivatives does not swamp the rank decision.
Mat normalized_columns(std::span<const Vec> columns);

Vec singular_values(const Mat& a);

// Smallest singular value of the normalized column set divided by
// max(1, largest).  Zero when there are more columns than rows.
double independence_witness(std::span<const Vec> columns);

// Number of singular values above tol * scale.
int numerical_rank(const Mat& a, double tol, double scale);

// Orthonormal basis of the Euclidean complement of span(a, b), built by
// Gram-Schmidt from coordinate axes.  `pivots` selects the seed axes; when empty
// the axes with the largest rejection are chosen and written back, so callers
// can keep the same seeds at neighbouring parameters and obtain a smooth frame.
std::vector<Vec> orthonormal_complement(const Vec& a, const Vec& b, std::vector<int>& pivots);

}  // namespace ntan
