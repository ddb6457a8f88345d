#pragma once

#include "msukf/linalg.hpp"

namespace msukf {

/// Per-state spread parameters. alpha(i) and kappa(i) control the sigma-point
/// pair (i, n+i); beta is shared by all states.
struct ScalingSet {
  Vector alpha;
  Vector kappa;
  double beta{2.0};

  [[nodiscard]] Eigen::Index dimension() const { return alpha.size(); }
  [[nodiscard]] bool is_uniform() const;
};

/// Mean and covariance weights for the 2n+1 sigma points.
///
/// Index 0 is the centre point; indices i and n+i share the weight 1/(2 Lambda_i).
/// The centre mean weight may be negative.
struct WeightSet {
  Vector mean;
  Vector cov;
  double gamma{0.0};

  [[nodiscard]] Eigen::Index point_count() const { return mean.size(); }
};

/// Validates and builds a multi-scaled set. Throws DimensionMismatch,
/// std::invalid_argument (alpha <= 0 or non-finite), or NonPositiveLambda.
[[nodiscard]] ScalingSet make_scaling(Vector alpha, Vector kappa, double beta);

/// All states share (alpha, kappa).
[[nodiscard]] ScalingSet standard_scaling(double alpha, double kappa, double beta, Eigen::Index n);

/// Lambda_i = alpha_i^2 (n + kappa_i).
[[nodiscard]] Vector lambda_multi(const ScalingSet& s);

/// gamma = 1 - (prod alpha_i)^(2/n) + beta.
[[nodiscard]] double gamma_multi(const ScalingSet& s);

[[nodiscard]] WeightSet weights(const ScalingSet& s);

}  // namespace msukf
