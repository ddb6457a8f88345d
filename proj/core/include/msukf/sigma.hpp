#pragma once

#include "msukf/linalg.hpp"
#include "msukf/scaling.hpp"

namespace msukf {

/// The 2n+1 sigma points of one generation step.
///
/// Points and deviations are stored column-wise: column 0 is the centre,
/// column i (1..n) is mean + delta_i, column n+i is mean - delta_i, where
/// delta_i = sqrt(Lambda_i) * (column i of the Cholesky factor of P).
/// Each pair uses its own Lambda_i.
struct SigmaPointSet {
  Matrix points;
  Matrix deviations;
  WeightSet weights;

  [[nodiscard]] Eigen::Index dimension() const { return points.rows(); }
  [[nodiscard]] Eigen::Index count() const { return points.cols(); }
};

/// Generates sigma points around `mean` for covariance `cov`.
/// Propagates NotPositiveDefinite / NotSymmetric from the Cholesky factorization.
[[nodiscard]] SigmaPointSet generate(const Vector& mean, const Matrix& cov, const ScalingSet& s);

/// Same as above with weights computed ahead of time; `big_lambda` must match them.
[[nodiscard]] SigmaPointSet generate(const Vector& mean, const Matrix& cov, const Vector& big_lambda,
                                     const WeightSet& w);

/// Sum_i w_i * transformed.col(i)
[[nodiscard]] Vector weighted_mean(const Vector& mean_weights, const Matrix& transformed);
[[nodiscard]] Vector weighted_mean(const SigmaPointSet& set, const Matrix& transformed);

/// Sum_i w_i (a_i - mean_a)(b_i - mean_b)^T. Not symmetrized; rectangular when
/// a and b live in different spaces.
[[nodiscard]] Matrix weighted_cov(const Vector& weights, const Matrix& a, const Vector& mean_a,
                                  const Matrix& b, const Vector& mean_b);

/// Uses the covariance weights of `set`.
[[nodiscard]] Matrix weighted_cov(const SigmaPointSet& set, const Matrix& a, const Vector& mean_a,
                                  const Matrix& b, const Vector& mean_b);

}  // namespace msukf
