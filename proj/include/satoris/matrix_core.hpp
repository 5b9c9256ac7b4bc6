#ifndef SATORIS_MATRIX_CORE_HPP
#define SATORIS_MATRIX_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <string_view>

#include "satoris/errors.hpp"

namespace satoris {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real matrix; for traffic data rows are vectorized spatial cells and
/// columns are time slots of one day.
using DensityMatrix = Matrix;

/// Relative cut-off below which singular values count as zero.
inline constexpr double kRankCutoff = 1e-12;

inline std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_same_shape(const Matrix& a, const Matrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + shape_string(a) + " vs " +
                         shape_string(b));
  }
}

inline void require_nonempty(const Matrix& m, std::string_view what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw DimensionError(std::string(what) + ": empty matrix");
  }
}

inline void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw DataError(std::string(what) + ": matrix contains NaN or Inf");
  }
}

inline Matrix hadamard(const Matrix& x, const Matrix& z) {
  require_same_shape(x, z, "hadamard");
  return x.cwiseProduct(z);
}

inline double frobenius_norm(const Matrix& x) { return x.norm(); }

/// Truncated (or thin) singular value decomposition X ~ U diag(sigma) V^T.
struct SvdResult {
  Matrix U;
  Vector sigma;
  Matrix V;

  Index rank() const { return sigma.size(); }
  Matrix reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }
};

namespace detail {

inline SvdResult thin_svd(const Matrix& x) {
  require_nonempty(x, "svd");
  require_finite(x, "svd");
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("svd: decomposition did not converge");
  }
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace detail

/// Sum of singular values, via a full SVD.
inline double nuclear_norm_svd(const Matrix& x) {
  return detail::thin_svd(x).sigma.sum();
}

/// Count of singular values above kRankCutoff * sigma_max.
inline Index numerical_rank(const Vector& sigma) {
  if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
  const double cut = kRankCutoff * sigma.maxCoeff();
  return (sigma.array() > cut).count();
}

inline Index numerical_rank(const Matrix& x) { return numerical_rank(detail::thin_svd(x).sigma); }

/// Flips each singular pair so that the largest-magnitude entry of every U
/// column is positive. Ties resolve to the lowest row index.
inline SvdResult sign_align(SvdResult svd) {
  for (Index j = 0; j < svd.U.cols(); ++j) {
    Index arg = 0;
    svd.U.col(j).cwiseAbs().maxCoeff(&arg);
    if (svd.U(arg, j) < 0.0) {
      svd.U.col(j) *= -1.0;
      svd.V.col(j) *= -1.0;
    }
  }
  return svd;
}

/// Best rank-k approximation factors (Eckart-Young), sign aligned.
inline SvdResult truncated_svd(const Matrix& x, Index k) {
  require_nonempty(x, "truncated_svd");
  if (k < 1 || k > std::min(x.rows(), x.cols())) {
    throw ArgumentError("truncated_svd: rank " + std::to_string(k) + " outside [1, " +
                        std::to_string(std::min(x.rows(), x.cols())) + "]");
  }
  SvdResult full = detail::thin_svd(x);
  SvdResult out{full.U.leftCols(k), full.sigma.head(k), full.V.leftCols(k)};
  return sign_align(std::move(out));
}

/// Max deviation of Q^T Q from the identity.
inline double orthonormality_error(const Matrix& q) {
  const Matrix gram = q.transpose() * q;
  return (gram - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

}  // namespace satoris

#endif  // SATORIS_MATRIX_CORE_HPP
