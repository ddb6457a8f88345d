#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msukf/linalg.hpp"

namespace msukf {

/// Dynamic map x_{k+1} = f(x_k, k) without noise; process noise is additive.
using DynamicsFn = std::function<Vector(const Vector& x, int step)>;
/// Measurement map z = h(x) without noise; measurement noise is additive.
using MeasurementFn = std::function<Vector(const Vector& x)>;

struct ModelSpec {
  std::string name;
  Eigen::Index state_dim{0};
  Eigen::Index measurement_dim{0};
  DynamicsFn f;
  MeasurementFn h;
  Matrix process_noise;      // Q
  Matrix measurement_noise;  // R
  Vector x0;                 // true initial state, also the filter's initial mean
  Matrix p0;
  double dt{1.0};
  int duration{0};
  /// Present when h is linear (h(x) = H x).
  std::optional<Matrix> measurement_matrix;
};

/// Throws DimensionMismatch / NotSymmetric / NotPositiveDefinite on an inconsistent spec.
void validate(const ModelSpec& model);

/// Logistic function 1 / (1 + e^-x).
[[nodiscard]] double sig(double x);

/// Two independent sigmoid states coupled only through H.
struct Sigmoid2dParams {
  double dt{0.05};
  int duration{600};
  Vector x0{Vector::Constant(2, 1.5)};
  Vector a{Vector::Constant(2, 120.0)};
  Vector b{Vector::Constant(2, -3.0)};
  double g{3.0};
  Vector q{(Vector(2) << 0.5, 0.05).finished()};
  Vector r{(Vector(2) << 0.75 * 0.75, 0.15 * 0.15).finished()};
  Matrix h{(Matrix(2, 2) << 1.0, 0.1, 0.1, 1.0).finished()};
  Matrix p0{(Matrix(2, 2) << 2.5, 0.0, 0.0, 0.1).finished()};
};

/// Two-axis servo with a cogging-torque harmonic on axis 1.
struct Servo2dParams {
  double dt{0.01};
  int duration{600};
  Vector x0{Vector::Zero(2)};
  Vector a{(Vector(2) << 3.0, 5.0).finished()};
  Vector b{(Vector(2) << 2.3, 3.0).finished()};
  double cogging_amplitude{0.3};
  double cogging_harmonic{2.0};
  Vector q{(Vector(2) << 0.001, 0.01).finished()};
  Vector r{(Vector(2) << 1.5 * 1.5, 1.5 * 1.5).finished()};
  Matrix h{Matrix::Identity(2, 2)};
  Matrix p0{(Matrix(2, 2) << 0.7, 0.0, 0.0, 1.0).finished()};
  /// true: axis 2 is driven by cos(b2 * x1); false: by cos(b2 * x2).
  bool x2_couples_to_x1{true};
};

/// x_{k+1} = F x_k + w,  z = H x + v.
struct LinearParams {
  Matrix f;
  Matrix h;
  Matrix q;
  Matrix r;
  Vector x0;
  Matrix p0;
  double dt{1.0};
  int duration{100};
};

[[nodiscard]] ModelSpec sigmoid2d_model(const Sigmoid2dParams& params = {});
[[nodiscard]] ModelSpec servo2d_model(const Servo2dParams& params = {});
[[nodiscard]] ModelSpec linear_model(const LinearParams& params);

/// Ground truth and noisy measurements for one Monte-Carlo run.
///
/// true_states has duration+1 entries (x_0..x_N); measurements[k] observes
/// true_states[k+1].
struct Trajectory {
  std::vector<Vector> true_states;
  std::vector<Vector> measurements;
  std::uint64_t seed{0};
};

[[nodiscard]] Trajectory simulate(const ModelSpec& model, std::uint64_t seed);

/// Columns: step, true_x1..true_xn, z1..zm. Row k pairs x_{k+1} with its measurement.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace msukf
