#include "msukf/models.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "msukf/csv.hpp"
#include "msukf/errors.hpp"
#include "msukf/random.hpp"

namespace msukf {

namespace {

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
}

void require_psd(const Matrix& m, const char* what) {
  if (!linalg::is_symmetric(m)) throw NotSymmetric(std::string(what) + " is not symmetric");
  try {
    (void)linalg::psd_sqrt(m);
  } catch (const NotPositiveDefinite&) {
    throw NotPositiveDefinite(std::string(what) + " is not positive semi-definite");
  }
}

Matrix diagonal_from(const Vector& d) { return d.asDiagonal(); }

}  // namespace

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void validate(const ModelSpec& model) {
  const Eigen::Index n = model.state_dim;
  const Eigen::Index m = model.measurement_dim;
  if (n < 1 || m < 1) throw DimensionMismatch(model.name + ": dimensions must be >= 1");
  if (!model.f || !model.h) throw std::invalid_argument(model.name + ": f and h must be set");
  require_shape(model.process_noise, n, n, "Q");
  require_shape(model.measurement_noise, m, m, "R");
  require_shape(model.p0, n, n, "P0");
  if (model.x0.size() != n) throw DimensionMismatch(model.name + ": x0 length mismatch");
  require_psd(model.process_noise, "Q");
  require_psd(model.measurement_noise, "R");
  (void)linalg::cholesky(model.p0);
  if (model.measurement_matrix) require_shape(*model.measurement_matrix, m, n, "H");
  if (model.duration < 0) throw std::invalid_argument(model.name + ": duration must be >= 0");
  if (!(model.dt > 0.0)) throw std::invalid_argument(model.name + ": dt must be > 0");
}

ModelSpec sigmoid2d_model(const Sigmoid2dParams& p) {
  ModelSpec model;
  model.name = "sigmoid2d";
  model.state_dim = 2;
  model.measurement_dim = 2;
  model.f = [a = p.a, b = p.b, g = p.g, dt = p.dt](const Vector& x, int) -> Vector {
    Vector next(2);
    for (Eigen::Index i = 0; i < 2; ++i) next(i) = a(i) * dt * sig(g * x(i)) + b(i);
    return next;
  };
  model.h = [h = p.h](const Vector& x) -> Vector { return h * x; };
  model.process_noise = diagonal_from(p.q);
  model.measurement_noise = diagonal_from(p.r);
  model.x0 = p.x0;
  model.p0 = p.p0;
  model.dt = p.dt;
  model.duration = p.duration;
  model.measurement_matrix = p.h;
  require_shape(p.a, 2, 1, "a");
  require_shape(p.b, 2, 1, "b");
  require_shape(p.q, 2, 1, "q");
  require_shape(p.r, 2, 1, "r");
  validate(model);
  return model;
}

ModelSpec servo2d_model(const Servo2dParams& p) {
  ModelSpec model;
  model.name = "servo2d";
  model.state_dim = 2;
  model.measurement_dim = 2;
  model.f = [p](const Vector& x, int) -> Vector {
    Vector next(2);
    next(0) = x(0) + p.dt * p.a(0) * std::sin(p.b(0) * x(0)) +
              p.dt * p.cogging_amplitude * std::sin(p.cogging_harmonic * x(0));
    const double drive = p.x2_couples_to_x1 ? x(0) : x(1);
    next(1) = x(1) + p.dt * p.a(1) * std::cos(p.b(1) * drive);
    return next;
  };
  model.h = [h = p.h](const Vector& x) -> Vector { return h * x; };
  model.process_noise = diagonal_from(p.q);
  model.measurement_noise = diagonal_from(p.r);
  model.x0 = p.x0;
  model.p0 = p.p0;
  model.dt = p.dt;
  model.duration = p.duration;
  model.measurement_matrix = p.h;
  require_shape(p.a, 2, 1, "a");
  require_shape(p.b, 2, 1, "b");
  require_shape(p.q, 2, 1, "q");
  require_shape(p.r, 2, 1, "r");
  validate(model);
  return model;
}

ModelSpec linear_model(const LinearParams& p) {
  ModelSpec model;
  model.name = "linear";
  model.state_dim = p.f.rows();
  model.measurement_dim = p.h.rows();
  require_shape(p.f, model.state_dim, model.state_dim, "F");
  model.f = [f = p.f](const Vector& x, int) -> Vector { return f * x; };
  model.h = [h = p.h](const Vector& x) -> Vector { return h * x; };
  model.process_noise = p.q;
  model.measurement_noise = p.r;
  model.x0 = p.x0;
  model.p0 = p.p0;
  model.dt = p.dt;
  model.duration = p.duration;
  model.measurement_matrix = p.h;
  validate(model);
  return model;
}

Trajectory simulate(const ModelSpec& model, std::uint64_t seed) {
  const Matrix q_sqrt = linalg::psd_sqrt(model.process_noise);
  const Matrix r_sqrt = linalg::psd_sqrt(model.measurement_noise);
  NormalGenerator normal(seed);

  Trajectory traj;
  traj.seed = seed;
  traj.true_states.reserve(static_cast<std::size_t>(model.duration) + 1);
  traj.measurements.reserve(static_cast<std::size_t>(model.duration));
  traj.true_states.push_back(model.x0);
  for (int k = 0; k < model.duration; ++k) {
    Vector next = model.f(traj.true_states.back(), k) + q_sqrt * normal.draw(model.state_dim);
    Vector z = model.h(next) + r_sqrt * normal.draw(model.measurement_dim);
    traj.true_states.push_back(std::move(next));
    traj.measurements.push_back(std::move(z));
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const Eigen::Index n = traj.true_states.empty() ? 0 : traj.true_states.front().size();
  const Eigen::Index m = traj.measurements.empty() ? 0 : traj.measurements.front().size();
  CsvWriter csv(os);
  csv.cell("step");
  for (Eigen::Index i = 0; i < n; ++i) csv.cell("true_x" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < m; ++i) csv.cell("z" + std::to_string(i + 1));
  csv.end_row();
  for (std::size_t k = 0; k < traj.measurements.size(); ++k) {
    csv.cell(static_cast<long long>(k + 1));
    for (Eigen::Index i = 0; i < n; ++i) csv.cell(traj.true_states[k + 1](i));
    for (Eigen::Index i = 0; i < m; ++i) csv.cell(traj.measurements[k](i));
    csv.end_row();
  }
}

}  // namespace msukf
