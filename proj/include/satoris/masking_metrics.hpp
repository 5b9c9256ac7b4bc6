#ifndef SATORIS_MASKING_METRICS_HPP
#define SATORIS_MASKING_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "satoris/csv_io.hpp"
#include "satoris/matrix_core.hpp"
#include "satoris/random.hpp"

namespace satoris {

/// Binary observation pattern: 1 = observed, 0 = missing.
class ObservationMask {
 public:
  ObservationMask() = default;

  static ObservationMask all_observed(Index rows, Index cols) {
    return ObservationMask(Matrix::Ones(rows, cols));
  }

  /// Accepts a 0/1 matrix; anything else is a data error.
  static ObservationMask from_matrix(const Matrix& bits) {
    require_nonempty(bits, "mask");
    for (Index j = 0; j < bits.cols(); ++j) {
      for (Index i = 0; i < bits.rows(); ++i) {
        if (bits(i, j) != 0.0 && bits(i, j) != 1.0) {
          throw DataError("mask: entry (" + std::to_string(i) + "," + std::to_string(j) +
                          ") is not 0 or 1");
        }
      }
    }
    return ObservationMask(bits);
  }

  Index rows() const { return bits_.rows(); }
  Index cols() const { return bits_.cols(); }
  bool observed(Index i, Index j) const { return bits_(i, j) != 0.0; }
  Index count_observed() const { return static_cast<Index>(bits_.sum()); }
  Index count_missing() const { return bits_.size() - count_observed(); }

  /// The mask as a 0/1 double matrix, ready for Hadamard products.
  const Matrix& bits() const { return bits_; }
  Matrix complement() const { return Matrix::Ones(rows(), cols()) - bits_; }

  /// FNV-1a over shape and bits; used to log that methods share masks.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    };
    mix(static_cast<std::uint64_t>(rows()));
    mix(static_cast<std::uint64_t>(cols()));
    for (Index j = 0; j < cols(); ++j)
      for (Index i = 0; i < rows(); ++i) mix(observed(i, j) ? 1U : 0U);
    return h;
  }

  friend bool operator==(const ObservationMask& a, const ObservationMask& b) {
    return a.bits_.rows() == b.bits_.rows() && a.bits_.cols() == b.bits_.cols() &&
           a.bits_ == b.bits_;
  }

 private:
  explicit ObservationMask(Matrix bits) : bits_(std::move(bits)) {}
  Matrix bits_;
};

inline void require_mask_shape(const Matrix& m, const ObservationMask& mask, std::string_view what) {
  if (m.rows() != mask.rows() || m.cols() != mask.cols()) {
    throw DimensionError(std::string(what) + ": mask " + std::to_string(mask.rows()) + "x" +
                         std::to_string(mask.cols()) + " does not match matrix " + shape_string(m));
  }
}

/// MCAR mask: each entry independently missing with probability
/// `missing_fraction`. Entries are drawn column-major from Rng(seed).
inline ObservationMask generate_mask(Index rows, Index cols, double missing_fraction,
                                     std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ArgumentError("generate_mask: shape must be positive");
  if (!(missing_fraction >= 0.0 && missing_fraction < 1.0)) {
    throw ArgumentError("generate_mask: missing fraction must lie in [0, 1)");
  }
  Rng rng(seed);
  Matrix bits(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) bits(i, j) = rng.uniform() < missing_fraction ? 0.0 : 1.0;
  return ObservationMask::from_matrix(bits);
}

/// Y = D o Omega.
inline Matrix apply_mask(const Matrix& d, const ObservationMask& mask) {
  require_mask_shape(d, mask, "apply_mask");
  return d.cwiseProduct(mask.bits());
}

/// Copies `source` at observed entries and `fill` elsewhere.
inline Matrix merge_observed(const Matrix& source, const Matrix& fill, const ObservationMask& mask) {
  require_mask_shape(source, mask, "merge_observed");
  require_same_shape(source, fill, "merge_observed");
  return mask.bits().select(source, fill);
}

struct ErrorReport {
  double rrmse = 0.0;
  double mae = 0.0;
  Index n_holdout = 0;
};

/// RRMSE and MAE over held-out (mask == 0) entries only.
/// RRMSE = ||(1-Omega) o (truth - imputed)||_F / ||(1-Omega) o truth||_F.
inline ErrorReport evaluate(const Matrix& truth, const Matrix& imputed, const ObservationMask& mask) {
  require_same_shape(truth, imputed, "evaluate");
  require_mask_shape(truth, mask, "evaluate");
  const Index n = mask.count_missing();
  if (n == 0) throw EvaluationError("evaluate: mask has no held-out entries");
  const Matrix held = mask.complement();
  const Matrix diff = held.cwiseProduct(truth - imputed);
  const double denom = held.cwiseProduct(truth).norm();
  if (denom == 0.0) throw EvaluationError("evaluate: held-out truth has zero norm");
  return {diff.norm() / denom, diff.cwiseAbs().sum() / static_cast<double>(n), n};
}

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;
};

struct AggregateReport {
  MetricSummary rrmse;
  MetricSummary mae;
  std::size_t count = 0;
};

/// Mean and population standard deviation of a sequence.
inline MetricSummary summarize_values(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("summarize_values: empty input");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

inline AggregateReport aggregate(std::span<const ErrorReport> reports) {
  if (reports.empty()) throw ArgumentError("aggregate: no reports");
  std::vector<double> r, m;
  r.reserve(reports.size());
  m.reserve(reports.size());
  for (const auto& rep : reports) {
    r.push_back(rep.rrmse);
    m.push_back(rep.mae);
  }
  return {summarize_values(r), summarize_values(m), reports.size()};
}

inline ObservationMask read_csv_mask(const std::filesystem::path& path) {
  return ObservationMask::from_matrix(read_csv_matrix(path));
}

inline void write_csv_mask(const std::filesystem::path& path, const ObservationMask& mask) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (Index i = 0; i < mask.rows(); ++i) {
    for (Index j = 0; j < mask.cols(); ++j) {
      if (j) out << ',';
      out << (mask.observed(i, j) ? '1' : '0');
    }
    out << '\n';
  }
}

}  // namespace satoris

#endif  // SATORIS_MASKING_METRICS_HPP
