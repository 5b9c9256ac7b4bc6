#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "satoris/datasets.hpp"
#include "satoris/subspace.hpp"

using namespace satoris;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Synthetic, DefaultShapeAndNonnegative) {
  const auto days = generate_synthetic_days(SyntheticGenerator{}, 3);
  ASSERT_EQ(days.size(), 3u);
  for (const auto& d : days) {
    EXPECT_EQ(d.rows(), 340);
    EXPECT_EQ(d.cols(), 24);
    EXPECT_GE(d.minCoeff(), 0.0);
  }
  SyntheticGenerator g;
  g.rows = 320;
  g.noise = 0.05;
  EXPECT_EQ(generate_synthetic_days(g, 1).front().rows(), 320);
}

TEST(Synthetic, ZeroDriftGivesIdenticalDays) {
  SyntheticGenerator g;
  g.drift_angle = 0.0;
  const auto days = generate_synthetic_days(g, 4);
  for (const auto& d : days) EXPECT_EQ(d, days.front());
}

TEST(Synthetic, DeterministicPerSeed) {
  SyntheticGenerator g;
  g.rows = 50;
  g.noise = 0.1;
  g.seed = 3;
  EXPECT_EQ(generate_synthetic_days(g, 2), generate_synthetic_days(g, 2));
  SyntheticGenerator h = g;
  h.seed = 4;
  EXPECT_NE(generate_synthetic_days(g, 2)[1], generate_synthetic_days(h, 2)[1]);
}

TEST(Synthetic, SharedSubspaceIsMoreStableThanFresh) {
  SyntheticGenerator g;
  g.rows = 80;
  g.drift_angle = 0.1;
  g.seed = 5;
  SyntheticGenerator fresh = g;
  fresh.shared_subspace = false;
  const double shared = stability_series(generate_synthetic_days(g, 3), 5, Side::left)[0].mean;
  const double other = stability_series(generate_synthetic_days(fresh, 3), 5, Side::left)[0].mean;
  EXPECT_GT(shared, other);
}

TEST(Synthetic, ValidateRejectsBadParameters) {
  SyntheticGenerator g;
  g.rank = 30;
  EXPECT_THROW(generate_synthetic_days(g, 1), ArgumentError);
  g = SyntheticGenerator{};
  g.drift_angle = 2.0;
  EXPECT_THROW(generate_synthetic_days(g, 1), ArgumentError);
  EXPECT_THROW(generate_synthetic_days(SyntheticGenerator{}, 0), ArgumentError);
}

TEST(Dataset, WriteLoadRoundTrip) {
  SyntheticGenerator g;
  g.rows = 12;
  g.cols = 6;
  g.rank = 2;
  const auto days = generate_synthetic_days(g, 3);
  const fs::path dir = fresh_dir("satoris_dataset_roundtrip");
  write_dataset(dir, days);
  const auto back = load_indexed_dataset(dir);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(back[t].first, static_cast<int>(t));
    EXPECT_LT((back[t].second - days[t]).cwiseAbs().maxCoeff(), 1e-9 * days[t].cwiseAbs().maxCoeff());
  }
  fs::remove_all(dir);
}

TEST(Dataset, OrdersByNumericIndexAndSkipsOtherFiles) {
  const fs::path dir = fresh_dir("satoris_dataset_order");
  write_csv_matrix(dir / "day_10.csv", Matrix::Constant(2, 2, 10.0));
  write_csv_matrix(dir / "day_2.csv", Matrix::Constant(2, 2, 2.0));
  std::ofstream(dir / "notes.txt") << "x\n";
  std::ofstream(dir / "day_x.csv") << "1\n";
  const auto days = load_indexed_dataset(dir);
  ASSERT_EQ(days.size(), 2u);
  EXPECT_EQ(days[0].first, 2);
  EXPECT_EQ(days[1].first, 10);
  fs::remove_all(dir);
}

TEST(Dataset, LoadErrors) {
  const fs::path empty = fresh_dir("satoris_dataset_empty");
  EXPECT_THROW(load_dataset(empty), DataError);
  EXPECT_THROW(load_dataset(empty / "missing"), DataError);
  write_csv_matrix(empty / "day_0.csv", Matrix::Ones(3, 2));
  write_csv_matrix(empty / "day_1.csv", Matrix::Ones(2, 3));
  EXPECT_THROW(load_dataset(empty), DataError);
  fs::remove_all(empty);
}
