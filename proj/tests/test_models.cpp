#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "msukf/errors.hpp"
#include "msukf/models.hpp"
#include "msukf/random.hpp"

using namespace msukf;

namespace {

Matrix diag2(double a, double b) { return Vector((Vector(2) << a, b).finished()).asDiagonal(); }

LinearParams static_linear() {
  LinearParams p;
  p.f = Matrix::Identity(2, 2);
  p.h = (Matrix(2, 2) << 1.0, 0.1, 0.1, 1.0).finished();
  p.q = Matrix::Zero(2, 2);
  p.r = Matrix::Zero(2, 2);
  p.x0 = (Vector(2) << 0.5, -1.0).finished();
  p.p0 = Matrix::Identity(2, 2);
  p.duration = 25;
  return p;
}

}  // namespace

TEST(Sigmoid2d, Settings) {
  const ModelSpec m = sigmoid2d_model();
  EXPECT_EQ(m.name, "sigmoid2d");
  EXPECT_EQ(m.state_dim, 2);
  EXPECT_EQ(m.measurement_dim, 2);
  EXPECT_EQ(m.dt, 0.05);
  EXPECT_EQ(m.duration, 600);
  EXPECT_EQ(m.x0, (Vector(2) << 1.5, 1.5).finished());
  EXPECT_EQ(m.process_noise, diag2(0.5, 0.05));
  EXPECT_EQ(m.measurement_noise, diag2(0.5625, 0.0225));
  EXPECT_EQ(m.p0, diag2(2.5, 0.1));
  ASSERT_TRUE(m.measurement_matrix.has_value());
  EXPECT_EQ(*m.measurement_matrix, (Matrix(2, 2) << 1.0, 0.1, 0.1, 1.0).finished());
  const Sigmoid2dParams p;
  EXPECT_EQ(p.a, Vector::Constant(2, 120.0));
  EXPECT_EQ(p.b, Vector::Constant(2, -3.0));
  EXPECT_EQ(p.g, 3.0);
}

TEST(Sigmoid2d, Dynamics) {
  const ModelSpec m = sigmoid2d_model();
  EXPECT_LE(m.f(Vector::Zero(2), 0).norm(), 1e-14);
  EXPECT_LE((m.f(Vector::Constant(2, 1e3), 0) - Vector::Constant(2, 3.0)).norm(), 1e-12);
  EXPECT_LE((m.f(Vector::Constant(2, -1e3), 0) - Vector::Constant(2, -3.0)).norm(), 1e-12);
  const Vector x = (Vector(2) << 2.0, -1.0).finished();
  EXPECT_EQ(m.h(x), (Vector(2) << 1.9, -0.8).finished());
}

TEST(Servo2d, Settings) {
  const ModelSpec m = servo2d_model();
  EXPECT_EQ(m.name, "servo2d");
  EXPECT_EQ(m.dt, 0.01);
  EXPECT_EQ(m.duration, 600);
  EXPECT_EQ(m.x0, Vector::Zero(2));
  EXPECT_EQ(m.process_noise, diag2(0.001, 0.01));
  EXPECT_EQ(m.measurement_noise, diag2(2.25, 2.25));
  EXPECT_EQ(m.p0, diag2(0.7, 1.0));
  ASSERT_TRUE(m.measurement_matrix.has_value());
  EXPECT_EQ(*m.measurement_matrix, Matrix::Identity(2, 2));
  const Servo2dParams p;
  EXPECT_EQ(p.a, (Vector(2) << 3.0, 5.0).finished());
  EXPECT_EQ(p.b, (Vector(2) << 2.3, 3.0).finished());
  EXPECT_TRUE(p.x2_couples_to_x1);
}

TEST(Servo2d, Dynamics) {
  const ModelSpec coupled = servo2d_model();
  const Vector origin = coupled.f(Vector::Zero(2), 0);
  EXPECT_EQ(origin(0), 0.0);
  EXPECT_NEAR(origin(1), 0.05, 1e-15);

  const Vector x = (Vector(2) << std::numbers::pi / 2.0, 0.0).finished();
  const double b1 = 2.3;
  const double x1_next = x(0) + 0.03 * std::sin(b1 * x(0)) + 0.003 * std::sin(2.0 * x(0));
  EXPECT_NEAR(coupled.f(x, 0)(0), x1_next, 1e-15);
  EXPECT_NEAR(coupled.f(x, 0)(1), 0.05 * std::cos(3.0 * x(0)), 1e-15);

  Servo2dParams p;
  p.x2_couples_to_x1 = false;
  const ModelSpec decoupled = servo2d_model(p);
  EXPECT_NEAR(decoupled.f(x, 0)(1), 0.05, 1e-15);
}

TEST(Sig, Properties) {
  EXPECT_EQ(sig(0.0), 0.5);
  double prev = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.25) {
    const double s = sig(x);
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
    EXPECT_GT(s, prev);
    prev = s;
  }
  EXPECT_NEAR(sig(2.0) + sig(-2.0), 1.0, 1e-15);
}

TEST(Validate, RejectsInconsistentSpecs) {
  LinearParams p = static_linear();
  p.q = (Matrix(2, 2) << 1.0, 0.5, 0.0, 1.0).finished();
  EXPECT_THROW((void)linear_model(p), NotSymmetric);
  p = static_linear();
  p.r = diag2(1.0, -1.0);
  EXPECT_THROW((void)linear_model(p), NotPositiveDefinite);
  p = static_linear();
  p.x0 = Vector::Zero(3);
  EXPECT_THROW((void)linear_model(p), DimensionMismatch);
  Sigmoid2dParams s;
  s.q = Vector::Ones(3);
  EXPECT_THROW((void)sigmoid2d_model(s), DimensionMismatch);
}

TEST(Simulate, NoiselessStaticModelIsConstant) {
  const ModelSpec m = linear_model(static_linear());
  const Trajectory t = simulate(m, 1);
  ASSERT_EQ(t.true_states.size(), 26u);
  ASSERT_EQ(t.measurements.size(), 25u);
  const Vector z = *m.measurement_matrix * m.x0;
  for (const Vector& x : t.true_states) EXPECT_EQ(x, m.x0);
  for (const Vector& y : t.measurements) EXPECT_EQ(y, z);
}

TEST(Simulate, DeterministicPerSeed) {
  const ModelSpec m = sigmoid2d_model();
  const Trajectory a = simulate(m, 42);
  const Trajectory b = simulate(m, 42);
  const Trajectory c = simulate(m, 43);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(a.true_states, b.true_states);
  EXPECT_EQ(a.measurements, b.measurements);
  EXPECT_NE(a.measurements, c.measurements);
}

TEST(Simulate, ProcessNoiseCovarianceMatchesQ) {
  constexpr int kDraws = 100000;
  LinearParams p = static_linear();
  p.f = Matrix::Zero(2, 2);
  p.x0 = Vector::Zero(2);
  p.q = (Matrix(2, 2) << 0.5, 0.1, 0.1, 0.05).finished();
  p.duration = kDraws;
  const Trajectory t = simulate(linear_model(p), 2024);

  Vector mean = Vector::Zero(2);
  for (int k = 1; k <= kDraws; ++k) mean += t.true_states[k];
  mean /= kDraws;
  Matrix cov = Matrix::Zero(2, 2);
  for (int k = 1; k <= kDraws; ++k) {
    const Vector d = t.true_states[k] - mean;
    cov += d * d.transpose();
  }
  cov /= kDraws - 1;

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt((p.q(i, i) * p.q(j, j) + p.q(i, j) * p.q(i, j)) / kDraws);
      EXPECT_LE(std::abs(cov(i, j) - p.q(i, j)), 3.0 * se) << i << "," << j;
    }
  }
  EXPECT_LE(mean.norm(), 3.0 * std::sqrt(p.q.trace() / kDraws));
}

TEST(NormalGenerator, StandardMoments) {
  NormalGenerator g(7);
  constexpr int kDraws = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double x = g();
    sum += x;
    sq += x * x;
  }
  EXPECT_LE(std::abs(sum / kDraws), 3.0 / std::sqrt(kDraws));
  EXPECT_LE(std::abs(sq / kDraws - 1.0), 3.0 * std::sqrt(2.0 / kDraws));
}

TEST(TrajectoryCsv, HeaderAndRows) {
  LinearParams p = static_linear();
  p.duration = 3;
  const Trajectory t = simulate(linear_model(p), 1);
  std::ostringstream os;
  write_trajectory_csv(os, t);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "step,true_x1,true_x2,z1,z2");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
