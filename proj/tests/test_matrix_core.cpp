#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "satoris/csv_io.hpp"
#include "satoris/matrix_core.hpp"
#include "satoris/random.hpp"

using namespace satoris;

namespace {

Matrix random_matrix(std::uint64_t seed, Index rows, Index cols) {
  Rng rng(seed);
  return rng.normal_matrix(rows, cols);
}

Matrix planted_rank(std::uint64_t seed, Index rows, Index cols, Index rank) {
  Rng rng(seed);
  const Matrix u = random_orthonormal(rng, rows, rank);
  const Matrix v = random_orthonormal(rng, cols, rank);
  Vector s(rank);
  for (Index i = 0; i < rank; ++i) s(i) = 10.0 / static_cast<double>(i + 1);
  return u * s.asDiagonal() * v.transpose();
}

}  // namespace

TEST(Hadamard, HandComputed) {
  Matrix x(2, 2), z(2, 2), expected(2, 2);
  x << 1, 2, 3, 4;
  z << 0, 1, 1, 0;
  expected << 0, 2, 3, 0;
  EXPECT_EQ(hadamard(x, z), expected);
}

TEST(Hadamard, OnesAndZeros) {
  const Matrix x = random_matrix(1, 4, 3);
  EXPECT_EQ(hadamard(x, Matrix::Ones(4, 3)), x);
  EXPECT_EQ(hadamard(x, Matrix::Zero(4, 3)), Matrix::Zero(4, 3));
}

TEST(Hadamard, CommutativeAndAssociative) {
  const Matrix a = random_matrix(2, 5, 4), b = random_matrix(3, 5, 4), c = random_matrix(4, 5, 4);
  EXPECT_EQ(hadamard(a, b), hadamard(b, a));
  EXPECT_LT((hadamard(hadamard(a, b), c) - hadamard(a, hadamard(b, c))).norm(), 1e-14);
}

TEST(Hadamard, ShapeMismatchThrows) {
  EXPECT_THROW(hadamard(Matrix::Ones(2, 3), Matrix::Ones(3, 2)), DimensionError);
}

TEST(FrobeniusNorm, SmallCases) {
  EXPECT_EQ(frobenius_norm(Matrix::Zero(3, 2)), 0.0);
  EXPECT_NEAR(frobenius_norm(Matrix::Identity(3, 3)), std::sqrt(3.0), 1e-15);
  Matrix m(1, 2);
  m << 3, 4;
  EXPECT_DOUBLE_EQ(frobenius_norm(m), 5.0);
}

TEST(NuclearNorm, IdentityAndRankOne) {
  EXPECT_NEAR(nuclear_norm_svd(Matrix::Identity(5, 5)), 5.0, 1e-12);
  Vector u(3), v(2);
  u << 1, 2, 2;
  v << 3, 4;
  EXPECT_NEAR(nuclear_norm_svd(u * v.transpose()), 15.0, 1e-12);
}

TEST(NuclearNorm, MatchesGramEigenOracle) {
  const Matrix x = random_matrix(42, 8, 6);
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.transpose() * x);
  const double oracle = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  EXPECT_NEAR(nuclear_norm_svd(x), oracle, 1e-10 * oracle);
}

TEST(NuclearNorm, DominatesFrobeniusWithEqualityAtRankOne) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = random_matrix(seed, 7, 5);
    EXPECT_GT(nuclear_norm_svd(x), frobenius_norm(x) + 1e-6);
    const Matrix r1 = x.col(0) * x.row(0);
    EXPECT_NEAR(nuclear_norm_svd(r1), frobenius_norm(r1), 1e-10 * frobenius_norm(r1));
  }
}

TEST(TruncatedSvd, DiagonalMatrix) {
  const Matrix d = Eigen::Vector3d(5, 3, 1).asDiagonal();
  const SvdResult s = truncated_svd(d, 2);
  ASSERT_EQ(s.rank(), 2);
  EXPECT_NEAR(s.sigma(0), 5.0, 1e-14);
  EXPECT_NEAR(s.sigma(1), 3.0, 1e-14);
}

TEST(TruncatedSvd, FullRankReconstruction) {
  const Matrix x = random_matrix(7, 9, 6);
  const SvdResult s = truncated_svd(x, 6);
  EXPECT_LT((s.reconstruct() - x).norm() / x.norm(), 1e-8);
  EXPECT_LT(orthonormality_error(s.U), 1e-10);
  EXPECT_LT(orthonormality_error(s.V), 1e-10);
}

TEST(TruncatedSvd, PlantedRankThree) {
  const Matrix x = planted_rank(11, 20, 12, 3);
  const SvdResult s = truncated_svd(x, 3);
  EXPECT_LT((s.reconstruct() - x).norm() / x.norm(), 1e-8);
  for (Index i = 1; i < s.rank(); ++i) EXPECT_LE(s.sigma(i), s.sigma(i - 1));
  EXPECT_GE(s.sigma.minCoeff(), 0.0);
}

TEST(TruncatedSvd, ErrorMonotoneInRank) {
  const Matrix x = random_matrix(5, 10, 7);
  double previous = std::numeric_limits<double>::infinity();
  for (Index k = 1; k <= 7; ++k) {
    const double err = (truncated_svd(x, k).reconstruct() - x).norm();
    EXPECT_LE(err, previous + 1e-12);
    previous = err;
  }
}

TEST(TruncatedSvd, EckartYoungError) {
  const Matrix x = random_matrix(9, 8, 6);
  const SvdResult full = truncated_svd(x, 6);
  for (Index k = 1; k < 6; ++k) {
    const double expected = full.sigma.tail(6 - k).norm();
    EXPECT_NEAR((truncated_svd(x, k).reconstruct() - x).norm(), expected, 1e-10);
  }
}

TEST(TruncatedSvd, RankOutOfRangeThrows) {
  const Matrix x = random_matrix(1, 4, 3);
  EXPECT_THROW(truncated_svd(x, 0), ArgumentError);
  EXPECT_THROW(truncated_svd(x, 4), ArgumentError);
}

TEST(SignAlign, FlipsNegativeLeadingEntry) {
  SvdResult s;
  s.U = Matrix(2, 1);
  s.U << 0.6, -0.8;
  s.V = Matrix(2, 1);
  s.V << 1.0, 0.0;
  s.sigma = Vector::Ones(1);
  const SvdResult a = sign_align(s);
  EXPECT_EQ(a.U(1, 0), 0.8);
  EXPECT_EQ(a.U(0, 0), -0.6);
  EXPECT_EQ(a.V(0, 0), -1.0);
}

TEST(SignAlign, IdempotentAndPreservesReconstruction) {
  const Matrix x = random_matrix(3, 6, 4);
  const SvdResult raw = detail::thin_svd(x);
  const SvdResult a = sign_align(raw);
  const SvdResult b = sign_align(a);
  EXPECT_EQ(a.U, b.U);
  EXPECT_EQ(a.V, b.V);
  EXPECT_LT((a.reconstruct() - raw.reconstruct()).norm(), 1e-12 * x.norm());
  for (Index j = 0; j < a.U.cols(); ++j) {
    Index arg = 0;
    a.U.col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(a.U(arg, j), 0.0);
  }
}

TEST(NumericalRank, CutoffRelativeToLargest) {
  Vector s(3);
  s << 1.0, 1e-6, 1e-13;
  EXPECT_EQ(numerical_rank(s), 2);
  EXPECT_EQ(numerical_rank(planted_rank(4, 10, 8, 3)), 3);
  EXPECT_EQ(numerical_rank(Matrix(Matrix::Zero(3, 3))), 0);
}

TEST(Validation, NonFiniteRejected) {
  Matrix x = Matrix::Ones(2, 2);
  x(0, 1) = std::nan("");
  EXPECT_THROW(nuclear_norm_svd(x), DataError);
  EXPECT_THROW(require_nonempty(Matrix(0, 3), "x"), DimensionError);
}

TEST(Csv, RoundTripAtTwelveDigits) {
  const Matrix x = random_matrix(8, 5, 4) * 1234.5;
  std::stringstream buf;
  write_csv_matrix(buf, x);
  const Matrix back = parse_csv_matrix(buf);
  ASSERT_EQ(back.rows(), 5);
  ASSERT_EQ(back.cols(), 4);
  for (Index i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(back.data()[i], x.data()[i], 1e-11 * std::abs(x.data()[i]));
  }
}

TEST(Csv, ParsesPlainRowsAndRejectsRagged) {
  std::istringstream ok("1,2.5,-3\n4,5e-1,6\n\n");
  const Matrix m = parse_csv_matrix(ok);
  EXPECT_EQ(m.rows(), 2);
  EXPECT_EQ(m(1, 1), 0.5);
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(parse_csv_matrix(ragged), DataError);
  std::istringstream junk("1,abc\n");
  EXPECT_THROW(parse_csv_matrix(junk), DataError);
  std::istringstream nan("1,nan\n");
  EXPECT_THROW(parse_csv_matrix(nan), DataError);
}

TEST(Csv, FormatNumberUsesTwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Random, DeriveSeedDependsOnEveryCoordinate) {
  const auto base = derive_seed(7, {1, 2, 3});
  EXPECT_EQ(base, derive_seed(7, {1, 2, 3}));
  EXPECT_NE(base, derive_seed(8, {1, 2, 3}));
  EXPECT_NE(base, derive_seed(7, {1, 2, 4}));
  EXPECT_NE(base, derive_seed(7, {2, 1, 3}));
}

TEST(Random, UniformAndNormalMoments) {
  Rng rng(123);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
  double u = 0.0;
  for (int i = 0; i < n; ++i) u += rng.uniform();
  EXPECT_NEAR(u / n, 0.5, 0.005);
}

TEST(Random, OrthonormalBasis) {
  Rng rng(5);
  const Matrix q = random_orthonormal(rng, 30, 6);
  EXPECT_LT(orthonormality_error(q), 1e-12);
}
