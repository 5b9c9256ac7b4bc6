#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "satoris/masking_metrics.hpp"

using namespace satoris;

namespace {

Matrix positive_matrix(std::uint64_t seed, Index rows, Index cols) {
  Rng rng(seed);
  return rng.normal_matrix(rows, cols).cwiseAbs().array() + 0.5;
}

}  // namespace

TEST(GenerateMask, ZeroFractionIsAllObserved) {
  const ObservationMask m = generate_mask(7, 5, 0.0, 3);
  EXPECT_EQ(m.count_observed(), 35);
  EXPECT_EQ(m, ObservationMask::all_observed(7, 5));
}

TEST(GenerateMask, BinomialBoundAt340x24) {
  // Observed count ~ Binomial(8160, 0.5): mean 4080, std sqrt(8160 / 4).
  const double sd = std::sqrt(8160.0 * 0.25);
  EXPECT_NEAR(sd, 45.17, 0.01);
  for (std::uint64_t seed : {0ULL, 1ULL, 2ULL, 99ULL, 12345ULL}) {
    const ObservationMask m = generate_mask(340, 24, 0.5, seed);
    EXPECT_LT(std::abs(static_cast<double>(m.count_observed()) - 4080.0), 4.0 * sd) << "seed " << seed;
  }
}

TEST(GenerateMask, ObservedFractionConcentrates) {
  for (double f : {0.1, 0.25, 0.75, 0.9}) {
    const ObservationMask m = generate_mask(400, 100, f, 17);
    const double n = 40000.0;
    const double sd = std::sqrt(n * f * (1.0 - f));
    EXPECT_LT(std::abs(static_cast<double>(m.count_missing()) - n * f), 4.0 * sd) << f;
  }
}

TEST(GenerateMask, DeterministicPerSeed) {
  EXPECT_EQ(generate_mask(30, 12, 0.4, 5), generate_mask(30, 12, 0.4, 5));
  EXPECT_EQ(generate_mask(30, 12, 0.4, 5).hash(), generate_mask(30, 12, 0.4, 5).hash());
  EXPECT_FALSE(generate_mask(30, 12, 0.4, 5) == generate_mask(30, 12, 0.4, 6));
  EXPECT_NE(generate_mask(30, 12, 0.4, 5).hash(), generate_mask(30, 12, 0.4, 6).hash());
}

TEST(GenerateMask, RejectsBadFraction) {
  EXPECT_THROW(generate_mask(3, 3, 1.0, 0), ArgumentError);
  EXPECT_THROW(generate_mask(3, 3, -0.1, 0), ArgumentError);
  EXPECT_THROW(generate_mask(3, 3, std::nan(""), 0), ArgumentError);
}

TEST(Mask, FromMatrixValidatesBits) {
  Matrix bad = Matrix::Ones(2, 2);
  bad(1, 0) = 0.5;
  EXPECT_THROW(ObservationMask::from_matrix(bad), DataError);
}

TEST(ApplyMask, Cases) {
  const Matrix d = positive_matrix(1, 4, 3);
  EXPECT_EQ(apply_mask(d, ObservationMask::all_observed(4, 3)), d);
  Matrix single = Matrix::Zero(4, 3);
  single(2, 1) = 1.0;
  const Matrix y = apply_mask(d, ObservationMask::from_matrix(single));
  EXPECT_EQ(y(2, 1), d(2, 1));
  EXPECT_EQ((y.array() != 0.0).count(), 1);
  const ObservationMask m = generate_mask(4, 3, 0.5, 8);
  EXPECT_EQ(apply_mask(d, m), hadamard(d, m.bits()));
  EXPECT_THROW(apply_mask(d, ObservationMask::all_observed(3, 4)), DimensionError);
}

TEST(MergeObserved, KeepsSourceWhereObserved) {
  const Matrix src = positive_matrix(2, 5, 4);
  const Matrix fill = Matrix::Constant(5, 4, -1.0);
  const ObservationMask m = generate_mask(5, 4, 0.5, 3);
  const Matrix out = merge_observed(src, fill, m);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 4; ++j) EXPECT_EQ(out(i, j), m.observed(i, j) ? src(i, j) : -1.0);
}

TEST(Evaluate, HandComputedTwoByTwo) {
  Matrix truth(2, 2), imputed(2, 2), bits(2, 2);
  truth << 2, 0, 0, 2;
  imputed << 1, 0, 0, 1;
  bits << 0, 1, 1, 0;
  const ErrorReport r = evaluate(truth, imputed, ObservationMask::from_matrix(bits));
  EXPECT_EQ(r.mae, 1.0);
  EXPECT_EQ(r.rrmse, 0.5);
  EXPECT_EQ(r.n_holdout, 2);
}

TEST(Evaluate, PerfectAndUnitOffset) {
  const Matrix truth = positive_matrix(3, 6, 5);
  const ObservationMask m = generate_mask(6, 5, 0.5, 1);
  const ErrorReport exact = evaluate(truth, truth, m);
  EXPECT_EQ(exact.rrmse, 0.0);
  EXPECT_EQ(exact.mae, 0.0);
  EXPECT_NEAR(evaluate(truth, truth.array() + 1.0, m).mae, 1.0, 1e-15);
}

TEST(Evaluate, IgnoresObservedEntries) {
  const Matrix truth = positive_matrix(4, 6, 5);
  const ObservationMask m = generate_mask(6, 5, 0.5, 2);
  Matrix imputed = truth;
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 5; ++j)
      if (m.observed(i, j)) imputed(i, j) += 100.0;
  EXPECT_EQ(evaluate(truth, imputed, m).rrmse, 0.0);
}

TEST(Evaluate, ScaleInvarianceAndLinearMae) {
  const Matrix truth = positive_matrix(5, 8, 6);
  const Matrix imputed = truth + 0.3 * positive_matrix(6, 8, 6);
  const ObservationMask m = generate_mask(8, 6, 0.4, 4);
  const ErrorReport base = evaluate(truth, imputed, m);
  for (double c : {0.5, 3.0, 100.0, -2.0}) {
    const ErrorReport scaled = evaluate(c * truth, c * imputed, m);
    EXPECT_NEAR(scaled.rrmse, base.rrmse, 1e-12);
    EXPECT_NEAR(scaled.mae, std::abs(c) * base.mae, 1e-12 * std::abs(c) * base.mae);
  }
}

TEST(Evaluate, Errors) {
  const Matrix truth = positive_matrix(7, 3, 3);
  EXPECT_THROW(evaluate(truth, truth, ObservationMask::all_observed(3, 3)), EvaluationError);
  EXPECT_THROW(evaluate(Matrix::Zero(3, 3), truth, generate_mask(3, 3, 0.5, 1)), EvaluationError);
  EXPECT_THROW(evaluate(truth, Matrix::Zero(3, 2), generate_mask(3, 3, 0.5, 1)), DimensionError);
}

TEST(Aggregate, TwoPointAndSingle) {
  const std::vector<ErrorReport> two{{0.2, 1.0, 1}, {0.4, 3.0, 1}};
  const AggregateReport a = aggregate(two);
  EXPECT_NEAR(a.rrmse.mean, 0.3, 1e-15);
  EXPECT_NEAR(a.rrmse.std, 0.1, 1e-15);
  EXPECT_NEAR(a.mae.mean, 2.0, 1e-15);
  EXPECT_NEAR(a.mae.std, 1.0, 1e-15);
  const std::vector<ErrorReport> one{{0.7, 0.1, 4}};
  const AggregateReport b = aggregate(one);
  EXPECT_EQ(b.rrmse.mean, 0.7);
  EXPECT_EQ(b.rrmse.std, 0.0);
  EXPECT_THROW(aggregate(std::vector<ErrorReport>{}), ArgumentError);
}

TEST(Aggregate, MatchesDirectFormula) {
  const std::vector<double> v{0.11, 0.31, 0.07, 0.52, 0.2, 0.18, 0.29};
  std::vector<ErrorReport> reports;
  for (double x : v) reports.push_back({x, 2 * x, 1});
  double mean = 0.0;
  for (double x : v) mean += x / 7.0;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean) / 7.0;
  const AggregateReport a = aggregate(reports);
  EXPECT_NEAR(a.rrmse.mean, mean, 1e-15);
  EXPECT_NEAR(a.rrmse.std, std::sqrt(var), 1e-15);
  EXPECT_NEAR(a.mae.std, 2 * std::sqrt(var), 1e-15);
}

TEST(MaskCsv, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "satoris_mask_roundtrip.csv";
  const ObservationMask m = generate_mask(9, 4, 0.3, 21);
  write_csv_mask(path, m);
  EXPECT_EQ(read_csv_mask(path), m);
  std::filesystem::remove(path);
}
