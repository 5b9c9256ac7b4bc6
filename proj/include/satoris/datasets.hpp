#ifndef SATORIS_DATASETS_HPP
#define SATORIS_DATASETS_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "satoris/csv_io.hpp"
#include "satoris/matrix_core.hpp"
#include "satoris/random.hpp"

namespace satoris {

/// Parameters of the synthetic day generator standing in for real
/// traffic-density data.
///
/// Day t is U_t diag(s) V_t^T + noise, clipped at zero. U_0, V_0 have a
/// constant first column so the leading component acts as a positive
/// density level; the remaining singular values decay geometrically. With
/// `shared_subspace`, U_{t+1} = cos(theta) U_t + sin(theta) W_t where W_t is
/// a random orthonormal block orthogonal to U_t (same for V), so every
/// principal angle between adjacent days equals theta. Otherwise each day
/// draws fresh factors.
struct SyntheticGenerator {
  Index rows = 340;
  Index cols = 24;
  Index rank = 5;
  bool shared_subspace = true;
  double drift_angle = 0.1;
  double noise = 0.0;  ///< noise std as a fraction of the mean density level
  std::uint64_t seed = 0;
  double level = 10.0;  ///< mean density carried by the leading component
  double lead_ratio = 0.4;
  double decay = 0.7;

  void validate() const {
    if (rows < 1 || cols < 1) throw ArgumentError("synthetic: shape must be positive");
    if (rank < 1 || rank > std::min(rows, cols)) throw ArgumentError("synthetic: rank must lie in [1, min(rows, cols)]");
    if (!(drift_angle >= 0.0 && drift_angle <= std::numbers::pi / 2)) {
      throw ArgumentError("synthetic: drift angle must lie in [0, pi/2]");
    }
    if (!(noise >= 0.0)) throw ArgumentError("synthetic: noise must be >= 0");
    if (!(level > 0.0) || !(lead_ratio > 0.0) || !(decay > 0.0)) {
      throw ArgumentError("synthetic: level, lead_ratio and decay must be positive");
    }
    if (shared_subspace && drift_angle > 0.0 && (2 * rank > rows || 2 * rank > cols)) {
      throw ArgumentError("synthetic: drifting subspaces need rows and cols >= 2 * rank");
    }
  }

  Vector singular_values() const {
    Vector s(rank);
    s(0) = level * std::sqrt(static_cast<double>(rows * cols));
    for (Index i = 1; i < rank; ++i) s(i) = s(0) * lead_ratio * std::pow(decay, static_cast<double>(i - 1));
    return s;
  }
};

namespace detail {

/// Orthonormal basis whose first column is the normalized all-ones vector.
inline Matrix basis_with_constant(Rng& rng, Index n, Index k) {
  Matrix g = rng.normal_matrix(n, k);
  g.col(0).setOnes();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k);
  for (Index j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

/// Random orthonormal block orthogonal to span(q).
inline Matrix orthogonal_complement_block(Rng& rng, const Matrix& q) {
  Matrix g = rng.normal_matrix(q.rows(), q.cols());
  g -= q * (q.transpose() * g);
  g -= q * (q.transpose() * g);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(q.rows(), q.cols());
}

inline Matrix drift(Rng& rng, const Matrix& q, double theta) {
  if (theta == 0.0) return q;
  return std::cos(theta) * q + std::sin(theta) * orthogonal_complement_block(rng, q);
}

}  // namespace detail

inline std::vector<Matrix> generate_synthetic_days(const SyntheticGenerator& gen, Index n_days) {
  gen.validate();
  if (n_days < 1) throw ArgumentError("synthetic: n_days must be >= 1");
  Rng rng(gen.seed);
  const Vector s = gen.singular_values();
  const double noise_std = gen.noise * gen.level;
  Matrix u = detail::basis_with_constant(rng, gen.rows, gen.rank);
  Matrix v = detail::basis_with_constant(rng, gen.cols, gen.rank);
  std::vector<Matrix> days;
  days.reserve(static_cast<std::size_t>(n_days));
  for (Index t = 0; t < n_days; ++t) {
    if (t > 0) {
      if (gen.shared_subspace) {
        u = detail::drift(rng, u, gen.drift_angle);
        v = detail::drift(rng, v, gen.drift_angle);
      } else {
        u = detail::basis_with_constant(rng, gen.rows, gen.rank);
        v = detail::basis_with_constant(rng, gen.cols, gen.rank);
      }
    }
    Matrix day = u * s.asDiagonal() * v.transpose();
    if (noise_std > 0.0) day += noise_std * rng.normal_matrix(gen.rows, gen.cols);
    days.push_back(day.cwiseMax(0.0));
  }
  return days;
}

/// Loads day_<index>.csv files from `dir`, ordered by index.
inline std::vector<std::pair<int, Matrix>> load_indexed_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("load_dataset: " + dir.string() + " is not a directory");
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    constexpr std::string_view prefix = "day_";
    constexpr std::string_view ext = ".csv";
    if (name.size() <= prefix.size() + ext.size() || !name.starts_with(prefix) || !name.ends_with(ext)) continue;
    const std::string_view digits(name.data() + prefix.size(), name.size() - prefix.size() - ext.size());
    int index = 0;
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) continue;
    files.emplace_back(index, entry.path());
  }
  if (files.empty()) throw DataError("load_dataset: no day_<index>.csv files in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<std::pair<int, Matrix>> out;
  for (const auto& [index, path] : files) {
    Matrix m = read_csv_matrix(path);
    if (!out.empty() && (m.rows() != out.front().second.rows() || m.cols() != out.front().second.cols())) {
      throw DataError("load_dataset: " + path.filename().string() + " is " + shape_string(m) + ", expected " +
                      shape_string(out.front().second));
    }
    out.emplace_back(index, std::move(m));
  }
  return out;
}

inline std::vector<Matrix> load_dataset(const std::filesystem::path& dir) {
  std::vector<Matrix> out;
  for (auto& [index, m] : load_indexed_dataset(dir)) out.push_back(std::move(m));
  return out;
}

inline void write_dataset(const std::filesystem::path& dir, const std::vector<Matrix>& days) {
  std::filesystem::create_directories(dir);
  for (std::size_t t = 0; t < days.size(); ++t) {
    write_csv_matrix(dir / ("day_" + std::to_string(t) + ".csv"), days[t]);
  }
}

}  // namespace satoris

#endif  // SATORIS_DATASETS_HPP
