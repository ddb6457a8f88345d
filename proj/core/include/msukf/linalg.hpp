#pragma once

#include <Eigen/Dense>

namespace msukf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linalg {

inline constexpr double kSymmetryTolerance = 1e-9;

/// Lower-triangular factor L of a symmetric positive-definite P = L * L^T.
struct CholeskyFactor {
  Matrix lower;

  [[nodiscard]] Eigen::Index size() const { return lower.rows(); }
};

[[nodiscard]] bool all_finite(const Matrix& m);

/// ||P - P^T||_F <= tol * ||P||_F (a zero matrix is symmetric).
[[nodiscard]] bool is_symmetric(const Matrix& p, double tol = kSymmetryTolerance);

/// Plain (non-pivoted) Cholesky. Throws NotSymmetric or NotPositiveDefinite.
[[nodiscard]] CholeskyFactor cholesky(const Matrix& p);

/// Square root of a symmetric positive *semi*-definite matrix, used to colour
/// noise draws. Zero pivots produce zero columns instead of an error.
[[nodiscard]] Matrix psd_sqrt(const Matrix& p);

/// (P + P^T) / 2
[[nodiscard]] Matrix symmetrize(const Matrix& p);

/// Column i (zero-based) of L. Summing column(L,i) * column(L,i)^T over i gives P.
[[nodiscard]] Vector column(const CholeskyFactor& l, Eigen::Index i);

/// Solves X * (L L^T) = B for X, i.e. X = B * P^-1, without forming the inverse.
[[nodiscard]] Matrix right_solve(const CholeskyFactor& l, const Matrix& b);

}  // namespace linalg
}  // namespace msukf
