#include "msukf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msukf/errors.hpp"

namespace msukf::linalg {

namespace {

void require_square(const Matrix& p, const char* what) {
  if (p.rows() != p.cols() || p.rows() == 0) {
    throw DimensionMismatch(std::string(what) + ": expected a non-empty square matrix, got " +
                            std::to_string(p.rows()) + "x" + std::to_string(p.cols()));
  }
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool is_symmetric(const Matrix& p, double tol) {
  if (p.rows() != p.cols()) return false;
  const double scale = p.norm();
  if (scale == 0.0) return true;
  return (p - p.transpose()).norm() <= tol * scale;
}

CholeskyFactor cholesky(const Matrix& p) {
  require_square(p, "cholesky");
  if (!p.allFinite()) throw NonFinite("cholesky: input contains non-finite entries");
  if (!is_symmetric(p)) throw NotSymmetric("cholesky: input is not symmetric");

  const Eigen::Index n = p.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = p(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " is " +
                                std::to_string(pivot));
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = p(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return CholeskyFactor{std::move(l)};
}

Matrix psd_sqrt(const Matrix& p) {
  require_square(p, "psd_sqrt");
  if (!is_symmetric(p)) throw NotSymmetric("psd_sqrt: input is not symmetric");

  const Eigen::Index n = p.rows();
  const double tiny = 1e-14 * std::max(1.0, p.diagonal().cwiseAbs().maxCoeff());
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = p(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (pivot < -tiny) throw NotPositiveDefinite("psd_sqrt: matrix is indefinite");
    if (pivot <= tiny) continue;  // zero column
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = p(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return l;
}

Matrix symmetrize(const Matrix& p) {
  require_square(p, "symmetrize");
  return 0.5 * (p + p.transpose());
}

Vector column(const CholeskyFactor& l, Eigen::Index i) {
  if (i < 0 || i >= l.size()) {
    throw std::out_of_range("column: index " + std::to_string(i) + " out of range for size " +
                            std::to_string(l.size()));
  }
  return l.lower.col(i);
}

Matrix right_solve(const CholeskyFactor& l, const Matrix& b) {
  if (b.cols() != l.size()) throw DimensionMismatch("right_solve: column count mismatch");
  // X P = B  <=>  P X^T = B^T
  const auto tri = l.lower.triangularView<Eigen::Lower>();
  Matrix y = tri.solve(b.transpose());
  Matrix xt = tri.transpose().solve(y);
  return xt.transpose();
}

}  // namespace msukf::linalg
