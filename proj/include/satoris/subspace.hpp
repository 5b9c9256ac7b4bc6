#ifndef SATORIS_SUBSPACE_HPP
#define SATORIS_SUBSPACE_HPP

#include <cmath>
#include <span>
#include <vector>

#include "satoris/matrix_core.hpp"

namespace satoris {

/// Rank-k singular factors of a neighbor day together with the Gram priors
/// A = U S U^T and B = V S V^T that enter the block-PSD constraint.
struct SubspacePrior {
  SvdResult svd;
  Matrix A;
  Matrix B;
  int source_day = -1;

  Index rank() const { return svd.rank(); }
};

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Builds the Gram priors from a fully observed neighbor. Missing entries in
/// the neighbor must be imputed by the caller first; NaN is rejected.
inline SubspacePrior build_prior(const Matrix& neighbor, Index k, int source_day = -1) {
  require_finite(neighbor, "build_prior");
  SvdResult svd = truncated_svd(neighbor, k);
  Matrix a = symmetrize(svd.U * svd.sigma.asDiagonal() * svd.U.transpose());
  Matrix b = symmetrize(svd.V * svd.sigma.asDiagonal() * svd.V.transpose());
  return {std::move(svd), std::move(a), std::move(b), source_day};
}

struct OverlapStats {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and (1/k-normalized) spread of the singular values of U1^T U2, i.e.
/// of the cosines of the principal angles between the two column spans.
inline OverlapStats subspace_overlap(const Matrix& u1, const Matrix& u2) {
  require_same_shape(u1, u2, "subspace_overlap");
  require_nonempty(u1, "subspace_overlap");
  constexpr double tol = 1e-8;
  if (orthonormality_error(u1) > tol || orthonormality_error(u2) > tol) {
    throw ArgumentError("subspace_overlap: inputs must have orthonormal columns");
  }
  const Matrix cross = u1.transpose() * u2;
  Eigen::JacobiSVD<Matrix> svd(cross);
  const Vector s = svd.singularValues().cwiseMin(1.0).cwiseMax(0.0);
  const double k = static_cast<double>(s.size());
  const double mean = s.sum() / k;
  const double var = (s.array() - mean).square().sum() / k;
  return {mean, std::sqrt(var)};
}

enum class Side { left, right };

/// Overlap between rank-k singular subspaces of each adjacent pair of days.
inline std::vector<OverlapStats> stability_series(std::span<const Matrix> days, Index k, Side side) {
  if (days.size() < 2) throw ArgumentError("stability_series: need at least two days");
  for (const auto& d : days) require_same_shape(days.front(), d, "stability_series");
  std::vector<SvdResult> factors;
  factors.reserve(days.size());
  for (const auto& d : days) factors.push_back(truncated_svd(d, k));
  std::vector<OverlapStats> out;
  out.reserve(days.size() - 1);
  for (std::size_t t = 0; t + 1 < factors.size(); ++t) {
    const auto& a = side == Side::left ? factors[t].U : factors[t].V;
    const auto& b = side == Side::left ? factors[t + 1].U : factors[t + 1].V;
    out.push_back(subspace_overlap(a, b));
  }
  return out;
}

}  // namespace satoris

#endif  // SATORIS_SUBSPACE_HPP
