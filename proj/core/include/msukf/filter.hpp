#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "msukf/linalg.hpp"
#include "msukf/models.hpp"
#include "msukf/scaling.hpp"
#include "msukf/sigma.hpp"

namespace msukf {

struct StateEstimate {
  Vector mean;
  Matrix cov;
  int step{0};
};

struct FilterConfig {
  ScalingSet scaling;
  /// On a failed factorization, jitter_relative * trace(P) / n is added to the
  /// diagonal once before giving up.
  double jitter_relative{1e-9};
  std::shared_ptr<const ModelSpec> model;
};

/// Result of one time update: the prior and the sigma points after f.
///
/// `propagated.deviations` holds f(x_i) - predicted mean.
struct Prediction {
  StateEstimate predicted;
  SigmaPointSet propagated;
};

struct UpdateRecord {
  StateEstimate predicted;
  bool measured{false};
  Vector innovation;     // z - z_hat
  Matrix innovation_cov; // S
  Matrix gain;           // K
  StateEstimate posterior;
};

/// Unscented Kalman filter with per-state sigma-point scaling.
///
/// With a uniform ScalingSet this is the textbook scaled UKF. Sigma points are
/// drawn once per cycle; the propagated points are reused for the measurement
/// update. Noise is additive (no state augmentation).
///
/// Instances are immutable after construction and may be shared by threads.
class UnscentedFilter {
 public:
  explicit UnscentedFilter(FilterConfig cfg);

  [[nodiscard]] const FilterConfig& config() const { return cfg_; }
  [[nodiscard]] const ModelSpec& model() const { return *cfg_.model; }
  [[nodiscard]] const WeightSet& weights() const { return weights_; }

  /// Estimate at step 0 from the model's x0 and P0.
  [[nodiscard]] StateEstimate init() const;
  [[nodiscard]] StateEstimate init(const Vector& x0, const Matrix& p0) const;

  [[nodiscard]] Prediction time_update(const StateEstimate& est) const;

  [[nodiscard]] UpdateRecord measurement_update(const StateEstimate& predicted,
                                                const SigmaPointSet& propagated,
                                                const Vector& z) const;

  /// One time update per entry; a measurement update wherever a value is present.
  [[nodiscard]] std::vector<UpdateRecord> run(
      const StateEstimate& initial, const std::vector<std::optional<Vector>>& measurements) const;

  /// Sigma points for `est`, applying the jitter retry policy.
  [[nodiscard]] SigmaPointSet sigma_points(const StateEstimate& est) const;

 private:
  FilterConfig cfg_;
  Vector big_lambda_;
  WeightSet weights_;
};

/// Runs from the model's initial conditions.
[[nodiscard]] std::vector<UpdateRecord> run_filter(
    const FilterConfig& cfg, const std::vector<std::optional<Vector>>& measurements);

}  // namespace msukf
