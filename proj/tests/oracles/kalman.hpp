#pragma once

// Closed-form linear Kalman filter (Joseph-form covariance update).

#include <Eigen/Dense>

namespace oracle {

struct LinearKalman {
  Eigen::MatrixXd f, h, q, r;

  struct State {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
  };

  [[nodiscard]] State predict(const State& s) const {
    return {f * s.mean, f * s.cov * f.transpose() + q};
  }

  [[nodiscard]] State update(const State& prior, const Eigen::VectorXd& z) const {
    const Eigen::MatrixXd s = h * prior.cov * h.transpose() + r;
    const Eigen::MatrixXd k = prior.cov * h.transpose() * s.inverse();
    const Eigen::MatrixXd ikh =
        Eigen::MatrixXd::Identity(prior.cov.rows(), prior.cov.cols()) - k * h;
    return {prior.mean + k * (z - h * prior.mean),
            ikh * prior.cov * ikh.transpose() + k * r * k.transpose()};
  }
};

}  // namespace oracle
