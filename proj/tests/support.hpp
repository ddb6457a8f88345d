#pragma once

// Random draws shared by the property tests.

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "msukf/scaling.hpp"

namespace testing_support {

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Eigen::VectorXd vector(Eigen::Index n, double lo = -5.0, double hi = 5.0) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols, double lo = -1.0, double hi = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }

  /// A A^T + n eps I with random A.
  Eigen::MatrixXd spd(Eigen::Index n, double eps = 1e-3) {
    const Eigen::MatrixXd a = matrix(n, n, -2.0, 2.0);
    return a * a.transpose() + static_cast<double>(n) * eps * Eigen::MatrixXd::Identity(n, n);
  }

  /// alpha_i in [0.01, 2], kappa_i in [0, 3], beta = 2.
  msukf::ScalingSet scaling(Eigen::Index n) {
    Eigen::VectorXd alpha(n), kappa(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      alpha(i) = uniform(0.01, 2.0);
      kappa(i) = uniform(0.0, 3.0);
    }
    return msukf::make_scaling(alpha, kappa, 2.0);
  }

 private:
  std::mt19937_64 rng_;
};

/// Extended-precision sum of the entries, for checking identities on stored values.
inline double exact_sum(const Eigen::VectorXd& v) {
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += static_cast<long double>(v(i));
  return static_cast<double>(s);
}

}  // namespace testing_support
