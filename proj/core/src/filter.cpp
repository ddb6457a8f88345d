#include "msukf/filter.hpp"

#include <string>

#include "msukf/errors.hpp"

namespace msukf {

namespace {

Matrix apply_columns(const Matrix& points, Eigen::Index out_dim, const auto& fn) {
  Matrix out(out_dim, points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    Vector y = fn(Vector(points.col(i)));
    if (y.size() != out_dim) throw DimensionMismatch("model map returned a vector of wrong length");
    out.col(i) = y;
  }
  if (!out.allFinite()) throw NonFinite("model map produced non-finite values");
  return out;
}

}  // namespace

UnscentedFilter::UnscentedFilter(FilterConfig cfg) : cfg_(std::move(cfg)) {
  if (!cfg_.model) throw std::invalid_argument("UnscentedFilter: model is required");
  if (cfg_.scaling.dimension() != cfg_.model->state_dim) {
    throw DimensionMismatch("UnscentedFilter: scaling has " +
                            std::to_string(cfg_.scaling.dimension()) + " states, model has " +
                            std::to_string(cfg_.model->state_dim));
  }
  big_lambda_ = lambda_multi(cfg_.scaling);
  weights_ = msukf::weights(cfg_.scaling);
}

StateEstimate UnscentedFilter::init() const { return init(model().x0, model().p0); }

StateEstimate UnscentedFilter::init(const Vector& x0, const Matrix& p0) const {
  if (x0.size() != model().state_dim) throw DimensionMismatch("init: x0 length mismatch");
  (void)linalg::cholesky(p0);
  return StateEstimate{x0, linalg::symmetrize(p0), 0};
}

SigmaPointSet UnscentedFilter::sigma_points(const StateEstimate& est) const {
  try {
    return generate(est.mean, est.cov, big_lambda_, weights_);
  } catch (const NotPositiveDefinite&) {
    const auto n = static_cast<double>(est.cov.rows());
    const double jitter = cfg_.jitter_relative * est.cov.trace() / n;
    Matrix jittered = est.cov;
    jittered.diagonal().array() += jitter;
    try {
      return generate(est.mean, jittered, big_lambda_, weights_);
    } catch (const NotPositiveDefinite& e) {
      throw NotPositiveDefinite("step " + std::to_string(est.step) +
                                ": covariance not positive definite after jitter retry (" +
                                e.what() + ")");
    }
  }
}

Prediction UnscentedFilter::time_update(const StateEstimate& est) const {
  const SigmaPointSet sigma = sigma_points(est);
  const ModelSpec& m = model();

  SigmaPointSet propagated;
  propagated.weights = sigma.weights;
  propagated.points = apply_columns(sigma.points, m.state_dim,
                                    [&](const Vector& x) { return m.f(x, est.step); });

  StateEstimate predicted;
  predicted.step = est.step + 1;
  predicted.mean = weighted_mean(propagated, propagated.points);
  propagated.deviations = propagated.points.colwise() - predicted.mean;
  predicted.cov = weighted_cov(propagated, propagated.points, predicted.mean, propagated.points,
                               predicted.mean) +
                  m.process_noise;
  predicted.cov = linalg::symmetrize(predicted.cov);
  return Prediction{std::move(predicted), std::move(propagated)};
}

UpdateRecord UnscentedFilter::measurement_update(const StateEstimate& predicted,
                                                 const SigmaPointSet& propagated,
                                                 const Vector& z) const {
  const ModelSpec& m = model();
  if (z.size() != m.measurement_dim) throw DimensionMismatch("measurement_update: z length mismatch");
  if (propagated.count() != weights_.point_count()) {
    throw DimensionMismatch("measurement_update: sigma point count mismatch");
  }

  const Matrix zs = apply_columns(propagated.points, m.measurement_dim, m.h);
  const Vector z_hat = weighted_mean(propagated, zs);
  Matrix s = weighted_cov(propagated, zs, z_hat, zs, z_hat) + m.measurement_noise;
  s = linalg::symmetrize(s);
  const Matrix p_xz = weighted_cov(propagated, propagated.points, predicted.mean, zs, z_hat);

  linalg::CholeskyFactor s_chol;
  try {
    s_chol = linalg::cholesky(s);
  } catch (const Error& e) {
    throw SingularInnovation("step " + std::to_string(predicted.step) +
                             ": innovation covariance is not invertible (" + e.what() + ")");
  }

  UpdateRecord rec;
  rec.predicted = predicted;
  rec.measured = true;
  rec.innovation = z - z_hat;
  rec.gain = linalg::right_solve(s_chol, p_xz);
  rec.innovation_cov = std::move(s);
  rec.posterior.step = predicted.step;
  rec.posterior.mean = predicted.mean + rec.gain * rec.innovation;
  rec.posterior.cov =
      linalg::symmetrize(predicted.cov - rec.gain * rec.innovation_cov * rec.gain.transpose());

  if (!rec.posterior.mean.allFinite() || !rec.posterior.cov.allFinite()) {
    throw NonFinite("step " + std::to_string(predicted.step) + ": posterior is not finite");
  }
  if ((rec.posterior.cov.diagonal().array() < 0.0).any()) {
    throw NotPositiveDefinite("step " + std::to_string(predicted.step) +
                              ": posterior covariance has a negative variance");
  }
  return rec;
}

std::vector<UpdateRecord> UnscentedFilter::run(
    const StateEstimate& initial, const std::vector<std::optional<Vector>>& measurements) const {
  std::vector<UpdateRecord> records;
  records.reserve(measurements.size());
  StateEstimate current = initial;
  for (const auto& z : measurements) {
    Prediction pred = time_update(current);
    if (z) {
      records.push_back(measurement_update(pred.predicted, pred.propagated, *z));
    } else {
      UpdateRecord rec;
      rec.predicted = pred.predicted;
      rec.posterior = std::move(pred.predicted);
      records.push_back(std::move(rec));
    }
    current = records.back().posterior;
  }
  return records;
}

std::vector<UpdateRecord> run_filter(const FilterConfig& cfg,
                                     const std::vector<std::optional<Vector>>& measurements) {
  const UnscentedFilter filter(cfg);
  return filter.run(filter.init(), measurements);
}

}  // namespace msukf
