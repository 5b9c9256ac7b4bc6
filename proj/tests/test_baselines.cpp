#include <gtest/gtest.h>

#include <vector>

#include "satoris/baselines.hpp"
#include "satoris/datasets.hpp"

using namespace satoris;

namespace {

Matrix planted(std::uint64_t seed, Index rows, Index cols, Index rank) {
  Rng rng(seed);
  const Matrix u = random_orthonormal(rng, rows, rank);
  const Matrix v = random_orthonormal(rng, cols, rank);
  Vector s(rank);
  for (Index i = 0; i < rank; ++i) s(i) = 30.0 / static_cast<double>(i + 1);
  return u * s.asDiagonal() * v.transpose();
}

}  // namespace

TEST(MeanFill, SingleObservedValuePerColumn) {
  Matrix y = Matrix::Zero(4, 2);
  Matrix bits = Matrix::Zero(4, 2);
  y(1, 0) = 7.0;
  bits(1, 0) = 1.0;
  y(3, 1) = -2.0;
  bits(3, 1) = 1.0;
  const Matrix out = impute(MeanFill(), y, ObservationMask::from_matrix(bits));
  EXPECT_EQ(out.col(0), Vector::Constant(4, 7.0));
  EXPECT_EQ(out.col(1), Vector::Constant(4, -2.0));
  const Matrix global = impute(MeanFill(MeanFill::Scope::global), y, ObservationMask::from_matrix(bits));
  EXPECT_EQ(global(0, 0), 2.5);
  EXPECT_EQ(global(1, 0), 7.0);
}

TEST(MeanFill, EmptyColumnUsesGlobalMean) {
  Matrix y(2, 2), bits(2, 2);
  y << 1, 0, 3, 0;
  bits << 1, 0, 1, 0;
  const Matrix out = impute(MeanFill(), y, ObservationMask::from_matrix(bits));
  EXPECT_EQ(out(0, 1), 2.0);
  EXPECT_EQ(out(1, 1), 2.0);
}

TEST(Imputer, RejectsEmptyMask) {
  EXPECT_THROW(impute(MeanFill(), Matrix::Ones(2, 2), ObservationMask::from_matrix(Matrix::Zero(2, 2))),
               DataError);
}

TEST(Knn, HandComputedNeighbors) {
  // Row 0 misses column 2. Distances over shared columns 0 and 1:
  // row 1 -> 0, row 2 -> sqrt(3), row 3 -> larger.
  Matrix y(4, 3);
  y << 1, 2, 0,
       1, 2, 10,
       2, 3, 20,
       9, 9, 40;
  Matrix bits = Matrix::Ones(4, 3);
  bits(0, 2) = 0.0;
  const ObservationMask m = ObservationMask::from_matrix(bits);
  EXPECT_EQ(impute(KnnImputer(1), y, m)(0, 2), 10.0);
  EXPECT_EQ(impute(KnnImputer(2), y, m)(0, 2), 15.0);
  EXPECT_EQ(impute(KnnImputer(10), y, m)(0, 2), 70.0 / 3.0);
}

TEST(Knn, NoSharedColumnsFallsBackToColumnMean) {
  // Each row observes a single distinct column, so no row has a neighbor.
  Matrix y = Eigen::Vector3d(4, 5, 6).asDiagonal();
  const ObservationMask m = ObservationMask::from_matrix(Matrix::Identity(3, 3));
  const Matrix out = impute(KnnImputer(2), y, m);
  for (Index j = 0; j < 3; ++j) EXPECT_EQ(out.col(j), Vector::Constant(3, y(j, j)));
}

TEST(SoftImpute, RecoversRankOne) {
  Rng rng(3);
  const Vector u = rng.normal_matrix(20, 1).cwiseAbs().array() + 1.0;
  const Vector v = rng.normal_matrix(10, 1).cwiseAbs().array() + 1.0;
  const Matrix truth = u * v.transpose();
  const ObservationMask m = generate_mask(20, 10, 0.3, 4);
  std::vector<std::pair<double, double>> trace;
  SoftImpute::Options o;
  o.tolerance = 1e-9;
  o.max_sweeps = 500;
  const SoftImpute si(o, [&trace](double lambda, int, double objective) { trace.emplace_back(lambda, objective); });
  const Matrix out = impute(si, truth, m);
  EXPECT_LT(evaluate(truth, out, m).rrmse, 0.05);
  ASSERT_FALSE(trace.empty());
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].first != trace[i - 1].first) continue;
    EXPECT_LE(trace[i].second, trace[i - 1].second * (1.0 + 1e-12) + 1e-12) << "sweep " << i;
  }
}

TEST(IterativeSvd, RecoversPlantedRankTwo) {
  const Matrix truth = planted(5, 30, 12, 2);
  const ObservationMask m = generate_mask(30, 12, 0.3, 6);
  const Matrix out = impute(IterativeSvd(2, 2000, 1e-12), truth, m);
  EXPECT_LT(evaluate(truth, out, m).rrmse, 1e-3);
}

TEST(NNmin, FullyObservedIsPassthrough) {
  const Matrix y = planted(7, 6, 5, 2);
  const Completion c = impute_detailed(NNmin(), y, ObservationMask::all_observed(6, 5));
  EXPECT_EQ(c.values, y);
  ASSERT_TRUE(c.status.has_value());
}

TEST(NNmin, RecoversLowRankFromFewMissing) {
  const Matrix truth = planted(8, 20, 12, 1);
  const ObservationMask m = generate_mask(20, 12, 0.2, 9);
  const Completion c = impute_detailed(NNmin(), truth, m);
  EXPECT_EQ(c.status, SolveStatus::converged);
  EXPECT_LT(evaluate(truth, c.values, m).rrmse, 1e-3);
}

TEST(NNmin, UnitWeightPenalizedFormCollapsesToZero) {
  const Matrix y = planted(10, 8, 6, 2);
  const ObservationMask m = generate_mask(8, 6, 0.4, 11);
  const Completion c = NNmin(SolverOptions{}, 1.0).complete(y, m);
  EXPECT_LT(c.values.norm(), 1e-3 * y.norm());
}

TEST(Stacked, ShapesAndDimensionChecks) {
  const Matrix y = planted(12, 8, 5, 2);
  const ObservationMask m = generate_mask(8, 5, 0.4, 13);
  const Matrix h = impute_stacked(MeanFill(), y, m, Matrix::Ones(8, 3), StackingMode::horizontal);
  const Matrix v = impute_stacked(MeanFill(), y, m, Matrix::Ones(2, 5), StackingMode::vertical);
  EXPECT_EQ(h.rows(), 8);
  EXPECT_EQ(h.cols(), 5);
  EXPECT_EQ(v.rows(), 8);
  EXPECT_EQ(v.cols(), 5);
  EXPECT_THROW(impute_stacked(MeanFill(), y, m, Matrix::Ones(7, 5), StackingMode::horizontal), DimensionError);
  EXPECT_THROW(impute_stacked(MeanFill(), y, m, Matrix::Ones(8, 4), StackingMode::vertical), DimensionError);
  EXPECT_EQ(suffix(StackingMode::horizontal), "-h");
  EXPECT_EQ(suffix(StackingMode::vertical), "-v");
}

TEST(Stacked, GlobalMeanPoolsNeighborEntries) {
  const Matrix y = planted(14, 6, 4, 2);
  const ObservationMask m = generate_mask(6, 4, 0.5, 15);
  const Matrix d2 = Matrix::Constant(6, 3, 100.0);
  const double pooled = (y.cwiseProduct(m.bits()).sum() + d2.sum()) / (m.bits().sum() + 18.0);
  const Matrix out = impute_stacked(MeanFill(MeanFill::Scope::global), y, m, d2, StackingMode::horizontal);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 4; ++j) EXPECT_NEAR(out(i, j), m.observed(i, j) ? y(i, j) : pooled, 1e-12);
}

TEST(Stacked, NeighborImprovesNuclearNormCompletion) {
  SyntheticGenerator g;
  g.rows = 40;
  g.cols = 12;
  g.rank = 3;
  g.drift_angle = 0.05;
  g.seed = 16;
  const auto days = generate_synthetic_days(g, 2);
  const ObservationMask m = generate_mask(40, 12, 0.6, 17);
  const double plain = evaluate(days[0], impute(NNmin(), days[0], m), m).rrmse;
  const double informed = evaluate(days[0], srisi(days[0], m, days[1]), m).rrmse;
  EXPECT_LT(informed, plain);
}

TEST(Knn, UniformDistancesWithAllRowsGiveColumnMean) {
  // Shared column 0 is constant, so every pair of rows is at distance 0.
  Matrix y(4, 2), bits(4, 2);
  y << 1, 3,
       1, 0,
       1, 5,
       1, 10;
  bits << 1, 1,
          1, 0,
          1, 1,
          1, 1;
  const ObservationMask m = ObservationMask::from_matrix(bits);
  EXPECT_EQ(impute(KnnImputer(4), y, m)(1, 1), 6.0);
  EXPECT_EQ(impute(KnnImputer(4), y, m), impute(MeanFill(), y, m));
}

TEST(Stacked, TruthAsNeighborBeatsPlainNNminOnAverage) {
  double plain = 0.0, stacked = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix truth = planted(100 + seed, 16, 10, 2);
    const ObservationMask m = generate_mask(16, 10, 0.8, 200 + seed);
    plain += evaluate(truth, impute(NNmin(), truth, m), m).rrmse;
    stacked += evaluate(truth, srisi(truth, m, truth), m).rrmse;
  }
  EXPECT_LT(stacked, plain);
}

TEST(Stacked, SharedLeftFactorsBeatPlainNNminOnAverage) {
  double plain = 0.0, stacked = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(300 + seed);
    const Matrix u = random_orthonormal(rng, 16, 3);
    const Matrix truth = u * rng.normal_matrix(3, 10) * 10.0;
    const Matrix neighbor = u * rng.normal_matrix(3, 10) * 10.0;
    const ObservationMask m = generate_mask(16, 10, 0.75, 400 + seed);
    plain += evaluate(truth, impute(NNmin(), truth, m), m).rrmse;
    stacked += evaluate(truth, srisi(truth, m, neighbor), m).rrmse;
  }
  EXPECT_LT(stacked, plain);
}
