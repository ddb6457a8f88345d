#include "msukf/sigma.hpp"

#include <cmath>
#include <string>

#include "msukf/errors.hpp"

namespace msukf {

SigmaPointSet generate(const Vector& mean, const Matrix& cov, const ScalingSet& s) {
  return generate(mean, cov, lambda_multi(s), weights(s));
}

SigmaPointSet generate(const Vector& mean, const Matrix& cov, const Vector& big_lambda,
                       const WeightSet& w) {
  const Eigen::Index n = mean.size();
  if (cov.rows() != n || cov.cols() != n || big_lambda.size() != n ||
      w.point_count() != 2 * n + 1) {
    throw DimensionMismatch("generate: mean has " + std::to_string(n) +
                            " entries but covariance/scaling dimensions disagree");
  }
  const linalg::CholeskyFactor l = linalg::cholesky(cov);

  SigmaPointSet set;
  set.weights = w;
  set.deviations = Matrix::Zero(n, 2 * n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = std::sqrt(big_lambda(i));
    set.deviations.col(1 + i) = scale * l.lower.col(i);
    set.deviations.col(1 + n + i) = -set.deviations.col(1 + i);
  }
  set.points = set.deviations.colwise() + mean;
  set.points.col(0) = mean;
  return set;
}

Vector weighted_mean(const Vector& mean_weights, const Matrix& transformed) {
  if (transformed.cols() != mean_weights.size()) {
    throw DimensionMismatch("weighted_mean: " + std::to_string(transformed.cols()) +
                            " points for " + std::to_string(mean_weights.size()) + " weights");
  }
  if (transformed.cols() == 0) return Vector::Zero(transformed.rows());
  // Accumulated relative to the first point, with a compensated weight total.
  double total = 0.0;
  double carry = 0.0;
  Vector spread = Vector::Zero(transformed.rows());
  for (Eigen::Index i = 0; i < transformed.cols(); ++i) {
    const double w = mean_weights(i);
    const double t = total + w;
    carry += std::abs(total) >= std::abs(w) ? (total - t) + w : (w - t) + total;
    total = t;
    if (i > 0) spread += w * (transformed.col(i) - transformed.col(0));
  }
  return (total + carry) * transformed.col(0) + spread;
}

Vector weighted_mean(const SigmaPointSet& set, const Matrix& transformed) {
  return weighted_mean(set.weights.mean, transformed);
}

Matrix weighted_cov(const Vector& weights, const Matrix& a, const Vector& mean_a, const Matrix& b,
                    const Vector& mean_b) {
  if (a.cols() != weights.size() || b.cols() != weights.size()) {
    throw DimensionMismatch("weighted_cov: point count does not match weight count");
  }
  if (a.rows() != mean_a.size() || b.rows() != mean_b.size()) {
    throw DimensionMismatch("weighted_cov: mean length does not match point length");
  }
  Matrix out = Matrix::Zero(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    out.noalias() += weights(i) * (a.col(i) - mean_a) * (b.col(i) - mean_b).transpose();
  }
  return out;
}

Matrix weighted_cov(const SigmaPointSet& set, const Matrix& a, const Vector& mean_a, const Matrix& b,
                    const Vector& mean_b) {
  return weighted_cov(set.weights.cov, a, mean_a, b, mean_b);
}

}  // namespace msukf
