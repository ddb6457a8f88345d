#include "msukf/scaling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "msukf/errors.hpp"

namespace msukf {

namespace {

void validate(const ScalingSet& s) {
  const Eigen::Index n = s.alpha.size();
  if (n < 1) throw DimensionMismatch("scaling: state dimension must be >= 1");
  if (s.kappa.size() != n) {
    throw DimensionMismatch("scaling: alpha has " + std::to_string(n) + " entries, kappa has " +
                            std::to_string(s.kappa.size()));
  }
  if (!s.alpha.allFinite() || !s.kappa.allFinite() || !std::isfinite(s.beta)) {
    throw std::invalid_argument("scaling: parameters must be finite");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(s.alpha(i) > 0.0)) {
      throw std::invalid_argument("scaling: alpha[" + std::to_string(i) + "] must be > 0");
    }
  }
}

}  // namespace

bool ScalingSet::is_uniform() const {
  for (Eigen::Index i = 1; i < alpha.size(); ++i) {
    if (alpha(i) != alpha(0) || kappa(i) != kappa(0)) return false;
  }
  return true;
}

ScalingSet make_scaling(Vector alpha, Vector kappa, double beta) {
  ScalingSet s{std::move(alpha), std::move(kappa), beta};
  validate(s);
  (void)lambda_multi(s);
  return s;
}

ScalingSet standard_scaling(double alpha, double kappa, double beta, Eigen::Index n) {
  if (n < 1) throw DimensionMismatch("standard_scaling: n must be >= 1");
  return make_scaling(Vector::Constant(n, alpha), Vector::Constant(n, kappa), beta);
}

Vector lambda_multi(const ScalingSet& s) {
  validate(s);
  const auto n = static_cast<double>(s.dimension());
  Vector big_lambda(s.dimension());
  for (Eigen::Index i = 0; i < s.dimension(); ++i) {
    big_lambda(i) = s.alpha(i) * s.alpha(i) * (n + s.kappa(i));
    if (!(big_lambda(i) > 0.0)) {
      throw NonPositiveLambda("scaling: Lambda[" + std::to_string(i) +
                              "] = " + std::to_string(big_lambda(i)) + " is not positive");
    }
  }
  return big_lambda;
}

double gamma_multi(const ScalingSet& s) {
  validate(s);
  const Eigen::Index n = s.dimension();
  if (n == 1) return 1.0 - s.alpha(0) * s.alpha(0) + s.beta;
  // Squared geometric mean, via logs so that tiny alphas do not underflow the product.
  double log_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_sum += std::log(s.alpha(i));
  double sq_geo = std::exp(2.0 * log_sum / static_cast<double>(n));
  if (s.is_uniform()) sq_geo = s.alpha(0) * s.alpha(0);
  return 1.0 - sq_geo + s.beta;
}

WeightSet weights(const ScalingSet& s) {
  const Vector big_lambda = lambda_multi(s);
  const Eigen::Index n = s.dimension();

  WeightSet w;
  w.gamma = gamma_multi(s);
  w.mean.resize(2 * n + 1);

  // Neumaier summation keeps sum(w) == 1 tight when some Lambda_i are tiny and
  // the centre weight is a large negative number.
  double sum = 0.0;
  double carry = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double wi = 1.0 / (2.0 * big_lambda(i));
    w.mean(1 + i) = wi;
    w.mean(1 + n + i) = wi;
    for (int rep = 0; rep < 2; ++rep) {
      const double t = sum + wi;
      carry += std::abs(sum) >= std::abs(wi) ? (sum - t) + wi : (wi - t) + sum;
      sum = t;
    }
  }
  w.mean(0) = (1.0 - sum) - carry;

  w.cov = w.mean;
  w.cov(0) = w.mean(0) + w.gamma;
  return w;
}

}  // namespace msukf
