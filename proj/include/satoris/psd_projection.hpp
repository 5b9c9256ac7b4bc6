#ifndef SATORIS_PSD_PROJECTION_HPP
#define SATORIS_PSD_PROJECTION_HPP

#include <string>

#include "satoris/matrix_core.hpp"

namespace satoris {

/// Euclidean projection onto the PSD cone by eigenvalue clipping.
///
/// The reconstruction uses whichever side of the spectrum has fewer
/// eigenpairs, so low-rank iterates cost a thin product:
///   P = sum_{l>0} l z z^T        or        P = M - sum_{l<0} l z z^T.
/// Instances hold scratch buffers and are not shareable across threads.
class PsdProjector {
 public:
  explicit PsdProjector(Index n) : n_(n), solver_(n) {}

  Matrix project(const Matrix& sym) {
    if (sym.rows() != n_ || sym.cols() != n_) {
      throw DimensionError("PsdProjector: expected " + std::to_string(n_) + "x" + std::to_string(n_) +
                           ", got " + shape_string(sym));
    }
    solver_.compute(sym, Eigen::ComputeEigenvectors);
    if (solver_.info() != Eigen::Success) throw NumericError("PsdProjector: eigensolver did not converge");
    const Vector& values = solver_.eigenvalues();
    const Matrix& vectors = solver_.eigenvectors();

    Index negative = 0;
    while (negative < n_ && values(negative) < 0.0) ++negative;
    last_positive_ = n_ - negative;

    Matrix out;
    if (last_positive_ <= negative) {
      const Matrix scaled = vectors.rightCols(last_positive_) * values.tail(last_positive_).cwiseSqrt().asDiagonal();
      out.noalias() = scaled * scaled.transpose();
    } else {
      const Matrix scaled = vectors.leftCols(negative) * (-values.head(negative)).cwiseSqrt().asDiagonal();
      out = sym;
      out.noalias() += scaled * scaled.transpose();
    }
    return symmetrize(out);
  }

  /// Number of nonnegative eigenvalues seen on the last call.
  Index positive_count() const { return last_positive_; }

 private:
  static Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

  Index n_;
  Index last_positive_ = -1;
  Eigen::SelfAdjointEigenSolver<Matrix> solver_;
};

inline double min_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("min_eigenvalue: no convergence");
  return es.eigenvalues()(0);
}

}  // namespace satoris

#endif  // SATORIS_PSD_PROJECTION_HPP
