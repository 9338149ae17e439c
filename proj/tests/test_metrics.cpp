#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "flowcurl/error.hpp"
#include "flowcurl/metrics.hpp"
#include "test_support.hpp"

namespace flowcurl {
namespace {

using testing::random_normal;

double dist(const SampleSet& a, std::size_t i, const SampleSet& b, std::size_t j) {
  double s = 0;
  for (std::size_t k = 0; k < a.cols(); ++k) s += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
  return std::sqrt(s);
}

double naive_energy(const SampleSet& a, const SampleSet& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) ab += dist(a, i, b, j);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) aa += dist(a, i, a, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) bb += dist(b, i, b, j);
  const double na = static_cast<double>(a.rows()), nb = static_cast<double>(b.rows());
  return 2 * ab / (na * nb) - aa / (na * na) - bb / (nb * nb);
}

double naive_median(const SampleSet& a, const SampleSet& b) {
  SampleSet u(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) std::copy(a.row(i).begin(), a.row(i).end(), u.row(i).begin());
  for (std::size_t i = 0; i < b.rows(); ++i) std::copy(b.row(i).begin(), b.row(i).end(), u.row(a.rows() + i).begin());
  std::vector<double> d;
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = i + 1; j < u.rows(); ++j) d.push_back(dist(u, i, u, j));
  std::sort(d.begin(), d.end());
  const std::size_t n = d.size();
  return n % 2 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
}

double naive_mmd(const SampleSet& a, const SampleSet& b, double sigma) {
  auto k = [&](const SampleSet& x, std::size_t i, const SampleSet& y, std::size_t j) {
    const double r = dist(x, i, y, j);
    return std::exp(-r * r / (2 * sigma * sigma));
  };
  double aa = 0, bb = 0, ab = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) aa += k(a, i, a, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) bb += k(b, i, b, j);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) ab += k(a, i, b, j);
  const double na = static_cast<double>(a.rows()), nb = static_cast<double>(b.rows());
  return std::max(0.0, aa / (na * na) + bb / (nb * nb) - 2 * ab / (na * nb));
}

SampleSet column(std::initializer_list<double> v) { return SampleSet(v.size(), 1, std::vector<double>(v)); }

TEST(SlicedW2, IdenticalSetsGiveZero) {
  Rng rng(1);
  const auto a = random_normal(300, 3, rng);
  Rng proj(2);
  EXPECT_EQ(sliced_w2(a, a, 64, proj), 0.0);
}

TEST(SlicedW2, UnitShiftInOneDimension) {
  Rng proj(3);
  EXPECT_NEAR(sliced_w2(column({0, 0}), column({1, 1}), 16, proj), 1.0, 1e-15);
}

TEST(SlicedW2, ShiftedGaussians) {
  Rng rng(4);
  const auto a = random_normal(4096, 2, rng);
  auto b = random_normal(4096, 2, rng);
  for (std::size_t r = 0; r < b.rows(); ++r) b(r, 0) += 2.0;
  Rng proj(5);
  EXPECT_NEAR(sliced_w2(a, b, 128, proj), std::sqrt(2.0), 0.1);
}

TEST(SlicedW2, UnequalSizesUseQuantileCoupling) {
  // Quantile functions differ by 0.5 on [1/3, 2/3): W2^2 = 0.25 / 3.
  const std::vector<double> a{0, 1}, b{0, 0.5, 1};
  EXPECT_NEAR(w2_squared_sorted(a, b), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(w2_squared_sorted(b, a), 1.0 / 12.0, 1e-15);
  Rng rng(6);
  const auto x = random_normal(200, 2, rng);
  const auto y = random_normal(150, 2, rng);
  Rng p1(7), p2(7);
  EXPECT_NEAR(sliced_w2(x, y, 32, p1), sliced_w2(y, x, 32, p2), 1e-14);
}

TEST(SlicedW2, DeterministicAndStableInProjectionCount) {
  Rng rng(8);
  const auto a = random_normal(2048, 2, rng);
  auto b = random_normal(2048, 2, rng);
  for (std::size_t r = 0; r < b.rows(); ++r) b(r, 1) = 0.5 * b(r, 1) + 0.7;
  Rng p1(9), p2(9);
  EXPECT_EQ(sliced_w2(a, b, 128, p1), sliced_w2(a, b, 128, p2));
  std::vector<double> reps;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng p(100 + s);
    reps.push_back(sliced_w2(a, b, 128, p));
  }
  double mean = 0, var = 0;
  for (double v : reps) mean += v / 20;
  for (double v : reps) var += (v - mean) * (v - mean) / 19;
  Rng p128(10), p512(10);
  EXPECT_LT(std::abs(sliced_w2(a, b, 512, p512) - sliced_w2(a, b, 128, p128)), 3 * std::sqrt(var));
}

TEST(EnergyDistance, Examples) {
  EXPECT_EQ(energy_distance(column({0, 0}), column({1, 1})), 2.0);
  Rng rng(11);
  const auto a = random_normal(50, 2, rng);
  EXPECT_EQ(energy_distance(a, a), 0.0);
  EXPECT_THROW(energy_distance(column({0}), column({1})), InputError);
}

TEST(EnergyDistance, MatchesNaiveLoops) {
  Rng rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = random_normal(200, 2 + trial, rng);
    const auto b = random_normal(200 - 30 * trial, 2 + trial, rng, 0.3);
    const double naive = naive_energy(a, b);
    EXPECT_NEAR(energy_distance(a, b), naive, 1e-10 * naive);
    EXPECT_NEAR(energy_distance(b, a), naive, 1e-10 * naive);
  }
}

TEST(Mmd, Examples) {
  EXPECT_NEAR(mmd_rbf(column({0, 0}), column({1, 1}), Bandwidth::fixed(1.0)), 0.78693868057473315, 1e-15);
  EXPECT_EQ(mmd_rbf(column({0, 0}), column({1, 1}), Bandwidth::fixed(HUGE_VAL)), 0.0);
  EXPECT_LT(mmd_rbf(column({0, 0}), column({1, 1}), Bandwidth::fixed(1e8)), 1e-15);
  Rng rng(13);
  const auto a = random_normal(40, 3, rng);
  EXPECT_EQ(mmd_rbf(a, a), 0.0);
  EXPECT_THROW(mmd_rbf(a, a, Bandwidth::fixed(0.0)), DomainError);
  EXPECT_THROW(mmd_rbf(a, a, Bandwidth::fixed(-1.0)), DomainError);
}

TEST(Mmd, MatchesNaiveLoops) {
  Rng rng(14);
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = random_normal(200, 2, rng);
    const auto b = random_normal(180 + 10 * trial, 2, rng, 0.4);
    const double sigma = naive_median(a, b);
    EXPECT_NEAR(median_pairwise_distance(a, b), sigma, 1e-12 * sigma);
    const double naive = naive_mmd(a, b, sigma);
    EXPECT_NEAR(mmd_rbf(a, b), naive, 1e-10 * naive);
    EXPECT_NEAR(mmd_rbf(b, a), naive, 1e-10 * naive);
    const double fixed = naive_mmd(a, b, 0.7);
    EXPECT_NEAR(mmd_rbf(a, b, Bandwidth::fixed(0.7)), fixed, 1e-10 * fixed);
  }
}

TEST(Metrics, InputValidation) {
  Rng rng(15);
  const auto a = random_normal(10, 2, rng);
  const auto b = random_normal(10, 3, rng);
  EXPECT_THROW(energy_distance(a, b), ShapeError);
  EXPECT_THROW(mmd_rbf(a, b), ShapeError);
  Rng proj(1);
  EXPECT_THROW(sliced_w2(a, b, 8, proj), ShapeError);
  EXPECT_THROW(sliced_w2(a, a, 0, proj), DomainError);
  auto bad = a;
  bad(3, 1) = std::nan("");
  EXPECT_THROW(energy_distance(a, bad), InputError);
  EXPECT_THROW(sliced_w2(column({1}), column({1, 2}), 4, proj), InputError);
}

std::vector<ProfilePoint> grid_profile(double (*f)(double)) {
  std::vector<ProfilePoint> p;
  for (int i = 0; i <= 100; ++i) p.push_back({i / 100.0, f(i / 100.0), 1});
  return p;
}

TEST(UShapeRatio, Examples) {
  EXPECT_DOUBLE_EQ(u_shape_ratio(grid_profile([](double) { return 3.0; })), 1.0);
  // Grid means 0.2035 / 0.0036667 from tests/oracles/derived_values.py.
  EXPECT_NEAR(u_shape_ratio(grid_profile([](double t) { return (t - 0.5) * (t - 0.5); })), 55.5, 1e-9);
  EXPECT_LT(u_shape_ratio(grid_profile([](double t) { return t * (1 - t); })), 1.0);
}

TEST(UShapeRatio, InsufficientData) {
  std::vector<ProfilePoint> few;
  for (int i = 0; i <= 9; ++i) few.push_back({i / 9.0, 1.0, 1});
  EXPECT_THROW(u_shape_ratio(few), InsufficientData);
  auto hole = grid_profile([](double) { return 1.0; });
  hole[50].count = 0;
  EXPECT_THROW(u_shape_ratio(hole), InsufficientData);
  auto outside = grid_profile([](double) { return 1.0; });
  outside[25].count = 0;
  EXPECT_DOUBLE_EQ(u_shape_ratio(outside), 1.0);
  std::vector<ProfilePoint> no_middle;
  for (int i = 0; i <= 20; ++i) no_middle.push_back({i < 11 ? i / 100.0 : 0.9 + (i - 11) / 100.0, 1.0, 1});
  EXPECT_THROW(u_shape_ratio(no_middle), InsufficientData);
}

TEST(Ks, SmallCases) {
  EXPECT_DOUBLE_EQ(ks_statistic({0.5}, [](double x) { return x; }), 0.5);
  EXPECT_DOUBLE_EQ(ks_statistic({0.25, 0.75}, [](double x) { return x; }), 0.25);
  EXPECT_DOUBLE_EQ(ks_statistic({0.0, 0.0}, [](double x) { return x; }), 1.0);
}

}  // namespace
}  // namespace flowcurl
