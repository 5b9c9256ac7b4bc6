#ifndef SATORIS_BASELINES_HPP
#define SATORIS_BASELINES_HPP

#include <algorithm>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "satoris/masking_metrics.hpp"
#include "satoris/sdp_engine.hpp"

namespace satoris {

/// Output of one imputation: the completed matrix plus an optional solver
/// status for optimization-based methods.
struct Completion {
  Matrix values;
  std::optional<SolveStatus> status;
};

/// Completion capability: given Y (entries at missing positions are ignored)
/// and its mask, produce a full matrix. Implementations need not copy
/// observed entries; impute() enforces passthrough.
class Imputer {
 public:
  virtual ~Imputer() = default;
  virtual std::string name() const = 0;
  virtual Completion complete(const Matrix& y, const ObservationMask& mask) const = 0;
};

namespace detail {

inline void check_imputer_input(const Matrix& y, const ObservationMask& mask, std::string_view who) {
  require_mask_shape(y, mask, who);
  if (mask.count_observed() == 0) throw DataError(std::string(who) + ": no observed entries");
  require_finite(apply_mask(y, mask), who);
}

/// Column means over observed entries; empty columns take the global mean.
inline Vector observed_column_means(const Matrix& y, const ObservationMask& mask) {
  const Matrix& bits = mask.bits();
  const double global = y.cwiseProduct(bits).sum() / bits.sum();
  Vector means(y.cols());
  for (Index j = 0; j < y.cols(); ++j) {
    const double count = bits.col(j).sum();
    means(j) = count > 0 ? y.col(j).cwiseProduct(bits.col(j)).sum() / count : global;
  }
  return means;
}

inline Matrix column_mean_fill(const Matrix& y, const ObservationMask& mask) {
  const Vector means = observed_column_means(y, mask);
  Matrix fill = means.transpose().replicate(y.rows(), 1);
  return merge_observed(y, fill, mask);
}

/// Singular value soft-thresholding.
inline Matrix shrink_singular_values(const Matrix& x, double threshold, double* nuclear = nullptr) {
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = (svd.singularValues().array() - threshold).cwiseMax(0.0).matrix();
  if (nuclear) *nuclear = s.sum();
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace detail

/// Validates input, runs the imputer, then enforces observed passthrough.
inline Completion impute_detailed(const Imputer& imputer, const Matrix& y, const ObservationMask& mask) {
  detail::check_imputer_input(y, mask, imputer.name());
  Completion c = imputer.complete(y, mask);
  if (c.values.rows() != y.rows() || c.values.cols() != y.cols()) {
    throw DimensionError(imputer.name() + ": output shape " + shape_string(c.values) + " differs from input");
  }
  c.values = merge_observed(y, c.values, mask);
  if (!c.values.allFinite()) throw NumericError(imputer.name() + ": output contains NaN or Inf");
  return c;
}

inline Matrix impute(const Imputer& imputer, const Matrix& y, const ObservationMask& mask) {
  return impute_detailed(imputer, y, mask).values;
}

/// Observed mean per column (empty columns: global observed mean), or the
/// global observed mean everywhere.
class MeanFill final : public Imputer {
 public:
  enum class Scope { column, global };
  explicit MeanFill(Scope scope = Scope::column) : scope_(scope) {}

  std::string name() const override { return "mean"; }

  Completion complete(const Matrix& y, const ObservationMask& mask) const override {
    if (scope_ == Scope::column) return {detail::column_mean_fill(y, mask), {}};
    const double global = y.cwiseProduct(mask.bits()).sum() / mask.bits().sum();
    return {merge_observed(y, Matrix::Constant(y.rows(), y.cols(), global), mask), {}};
  }

 private:
  Scope scope_;
};

/// Row-neighbor averaging. Distances use the observed-pair Euclidean
/// distance rescaled by cols / shared (NaN-Euclidean convention); rows
/// sharing no observed column are not neighbors. Ties keep the lower row.
class KnnImputer final : public Imputer {
 public:
  explicit KnnImputer(Index n_neighbors = 5) : k_(n_neighbors) {
    if (k_ < 1) throw ArgumentError("knn: n_neighbors must be >= 1");
  }

  std::string name() const override { return "knn"; }

  Completion complete(const Matrix& y, const ObservationMask& mask) const override {
    const Index rows = y.rows();
    const Index cols = y.cols();
    const Vector col_means = detail::observed_column_means(y, mask);
    Matrix out = y;
    std::vector<std::pair<double, Index>> candidates;
    for (Index i = 0; i < rows; ++i) {
      if (mask.bits().row(i).sum() == static_cast<double>(cols)) continue;
      std::vector<double> dist(rows, -1.0);
      for (Index r = 0; r < rows; ++r) {
        if (r == i) continue;
        double acc = 0.0;
        Index shared = 0;
        for (Index j = 0; j < cols; ++j) {
          if (mask.observed(i, j) && mask.observed(r, j)) {
            const double diff = y(i, j) - y(r, j);
            acc += diff * diff;
            ++shared;
          }
        }
        if (shared > 0) dist[r] = std::sqrt(acc * static_cast<double>(cols) / static_cast<double>(shared));
      }
      for (Index j = 0; j < cols; ++j) {
        if (mask.observed(i, j)) continue;
        candidates.clear();
        for (Index r = 0; r < rows; ++r) {
          if (dist[r] >= 0.0 && mask.observed(r, j)) candidates.emplace_back(dist[r], r);
        }
        if (candidates.empty()) {
          out(i, j) = col_means(j);
          continue;
        }
        const auto take = std::min<std::size_t>(static_cast<std::size_t>(k_), candidates.size());
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                          candidates.end());
        double sum = 0.0;
        for (std::size_t c = 0; c < take; ++c) sum += y(candidates[c].second, j);
        out(i, j) = sum / static_cast<double>(take);
      }
    }
    return {out, {}};
  }

 private:
  Index k_;
};

/// Soft-thresholded SVD iterations (Mazumder, Hastie & Tibshirani) along a
/// decreasing lambda ladder with warm starts.
class SoftImpute final : public Imputer {
 public:
  struct Options {
    int n_lambdas = 10;
    double lambda_max_ratio = 0.5;
    double lambda_min_ratio = 0.005;
    int max_sweeps = 100;
    double tolerance = 1e-5;
  };
  /// Called after every sweep with (lambda, sweep, objective) where the
  /// objective is 1/2 ||P_Omega(Y - Z)||_F^2 + lambda ||Z||_*.
  using Trace = std::function<void(double, int, double)>;

  SoftImpute() = default;
  explicit SoftImpute(Options options, Trace trace = {}) : options_(options), trace_(std::move(trace)) {}

  std::string name() const override { return "softimpute"; }

  Completion complete(const Matrix& y, const ObservationMask& mask) const override {
    const Matrix observed = apply_mask(y, mask);
    const Matrix& bits = mask.bits();
    Eigen::BDCSVD<Matrix> top(observed);
    const double sigma_max = top.singularValues()(0);
    Matrix z = Matrix::Zero(y.rows(), y.cols());
    if (sigma_max == 0.0) return {z, {}};

    const int steps = std::max(1, options_.n_lambdas);
    for (int l = 0; l < steps; ++l) {
      const double t = steps == 1 ? 1.0 : static_cast<double>(l) / (steps - 1);
      const double ratio =
          options_.lambda_max_ratio * std::pow(options_.lambda_min_ratio / options_.lambda_max_ratio, t);
      const double lambda = ratio * sigma_max;
      for (int sweep = 1; sweep <= options_.max_sweeps; ++sweep) {
        const Matrix filled = observed + (Matrix::Ones(y.rows(), y.cols()) - bits).cwiseProduct(z);
        double nuclear = 0.0;
        Matrix next = detail::shrink_singular_values(filled, lambda, &nuclear);
        const double change = (next - z).squaredNorm();
        const double base = std::max(z.squaredNorm(), 1e-300);
        z = std::move(next);
        if (trace_) {
          trace_(lambda, sweep, 0.5 * bits.cwiseProduct(observed - z).squaredNorm() + lambda * nuclear);
        }
        if (change / base < options_.tolerance) break;
      }
    }
    return {z, {}};
  }

 private:
  Options options_;
  Trace trace_;
};

/// Alternating rank-r projection: fill, truncate to rank r, refill the
/// missing entries, repeat.
class IterativeSvd final : public Imputer {
 public:
  explicit IterativeSvd(Index rank = 10, int max_iter = 100, double tolerance = 1e-5)
      : rank_(rank), max_iter_(max_iter), tolerance_(tolerance) {
    if (rank_ < 1) throw ArgumentError("itersvd: rank must be >= 1");
  }

  std::string name() const override { return "itersvd"; }

  Completion complete(const Matrix& y, const ObservationMask& mask) const override {
    const Index r = std::min({rank_, y.rows(), y.cols()});
    Matrix x = detail::column_mean_fill(y, mask);
    for (int it = 0; it < max_iter_; ++it) {
      Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Matrix low = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
                         svd.matrixV().leftCols(r).transpose();
      Matrix next = merge_observed(y, low, mask);
      const double change = (next - x).norm() / std::max(x.norm(), 1e-300);
      x = std::move(next);
      if (change < tolerance_) break;
    }
    return {x, {}};
  }

 private:
  Index rank_;
  int max_iter_;
  double tolerance_;
};

/// Nuclear-norm minimization, with ||X||_* expressed through the block-PSD
/// trace characterization. By default observed entries are interpolated
///   min ||X||_*  s.t.  X_ij = Y_ij on observed entries;
/// with `nuclear_weight` set, the penalized form
///   min ||Omega o (X - Y)||_F + nuclear_weight ||X||_*
/// is solved instead. The residual norm is not squared, so the penalized
/// form returns X = 0 whenever nuclear_weight >= 1.
class NNmin final : public Imputer {
 public:
  explicit NNmin(SolverOptions options = {}, std::optional<double> nuclear_weight = std::nullopt)
      : options_(options), weight_(nuclear_weight) {
    if (weight_ && !(*weight_ >= 0.0)) throw ArgumentError("nnmin: weight must be >= 0");
  }

  std::string name() const override { return "nnmin"; }

  static SdpProblem problem(const Matrix& y, const ObservationMask& mask,
                            std::optional<double> nuclear_weight = std::nullopt) {
    SdpProblem p;
    p.rows = y.rows();
    p.cols = y.cols();
    p.data.kind = nuclear_weight ? DataFit::masked_residual : DataFit::observed_equality;
    p.data.target = apply_mask(y, mask);
    p.data.mask = mask.bits();
    p.data.weight = 1.0;
    p.a.trace_weight = 0.5 * nuclear_weight.value_or(1.0);
    p.b.trace_weight = 0.5 * nuclear_weight.value_or(1.0);
    return p;
  }

  Completion complete(const Matrix& y, const ObservationMask& mask) const override {
    const SdpSolution s = solve(problem(y, mask, weight_), options_);
    return {s.X, s.status};
  }

 private:
  SolverOptions options_;
  std::optional<double> weight_;
};

/// Stacking direction for the implicit alignment meta-algorithm.
enum class StackingMode {
  horizontal,  ///< [Y1 | D2]: shares the left (spatial) subspace
  vertical,    ///< [Y1 ; D2]: shares the right (temporal) subspace
};

inline std::string_view suffix(StackingMode mode) { return mode == StackingMode::horizontal ? "-h" : "-v"; }

/// Runs `base` on the target stacked with a fully observed neighbor and
/// returns the target block.
inline Completion impute_stacked_detailed(const Imputer& base, const Matrix& y1, const ObservationMask& mask1,
                                          const Matrix& d2_full, StackingMode mode) {
  require_mask_shape(y1, mask1, "impute_stacked");
  require_finite(d2_full, "impute_stacked neighbor");
  const Index r = y1.rows();
  const Index c = y1.cols();
  Matrix stacked;
  Matrix bits;
  if (mode == StackingMode::horizontal) {
    if (d2_full.rows() != r) throw DimensionError("impute_stacked: -h needs equal row counts");
    stacked.resize(r, c + d2_full.cols());
    stacked << apply_mask(y1, mask1), d2_full;
    bits.resize(r, c + d2_full.cols());
    bits << mask1.bits(), Matrix::Ones(r, d2_full.cols());
  } else {
    if (d2_full.cols() != c) throw DimensionError("impute_stacked: -v needs equal column counts");
    stacked.resize(r + d2_full.rows(), c);
    stacked << apply_mask(y1, mask1), d2_full;
    bits.resize(r + d2_full.rows(), c);
    bits << mask1.bits(), Matrix::Ones(d2_full.rows(), c);
  }
  const Completion inner = impute_detailed(base, stacked, ObservationMask::from_matrix(bits));
  Completion out{inner.values.topLeftCorner(r, c), inner.status};
  out.values = merge_observed(y1, out.values, mask1);
  return out;
}

inline Matrix impute_stacked(const Imputer& base, const Matrix& y1, const ObservationMask& mask1,
                             const Matrix& d2_full, StackingMode mode) {
  return impute_stacked_detailed(base, y1, mask1, d2_full, mode).values;
}

/// Implicitly informed nuclear-norm minimization: NNmin on [Y1 | D2].
inline Matrix srisi(const Matrix& y1, const ObservationMask& mask1, const Matrix& d2_full,
                    const SolverOptions& options = {}) {
  return impute_stacked(NNmin(options), y1, mask1, d2_full, StackingMode::horizontal);
}

}  // namespace satoris

#endif  // SATORIS_BASELINES_HPP
