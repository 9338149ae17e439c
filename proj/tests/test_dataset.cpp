#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flowcurl/dataset.hpp"
#include "flowcurl/error.hpp"

namespace flowcurl {
namespace {

void expect_standardized(const SampleSet& s, double tol) {
  const double n = static_cast<double>(s.rows());
  for (std::size_t j = 0; j < s.cols(); ++j) {
    double m = 0, v = 0;
    for (std::size_t r = 0; r < s.rows(); ++r) m += s(r, j);
    m /= n;
    for (std::size_t r = 0; r < s.rows(); ++r) v += (s(r, j) - m) * (s(r, j) - m);
    v /= n;
    EXPECT_LT(std::abs(m), tol) << "column " << j;
    EXPECT_NEAR(v, 1.0, tol) << "column " << j;
  }
}

TEST(Dataset, SinglePointRowsEqualX0) {
  DatasetSpec spec{SinglePoint{{0.5, -1.25, 3.0}}, 100};
  Rng rng(1);
  const auto s = generate_dataset(spec, rng);
  ASSERT_EQ(s.rows(), 100u);
  ASSERT_EQ(s.cols(), 3u);
  for (std::size_t r = 0; r < 100; ++r) EXPECT_EQ(std::vector<double>(s.row(r).begin(), s.row(r).end()), (std::vector<double>{0.5, -1.25, 3.0}));
}

TEST(Dataset, GaussianMixtureStandardized) {
  DatasetSpec spec{GaussianMixture{8, 4.0, 0.3}, 100000};
  Rng rng(2, Stream::kData);
  expect_standardized(generate_dataset(spec, rng), 0.02);
}

TEST(Dataset, OtherShapesStandardized) {
  for (const DatasetSpec& spec : {DatasetSpec{TwoMoons{0.1}, 200000}, DatasetSpec{TwoMoons{0.0}, 200000},
                                  DatasetSpec{Checkerboard{4}, 200000}, DatasetSpec{Checkerboard{3}, 200000},
                                  DatasetSpec{GaussianMixture{3, 2.0, 0.5}, 200000}}) {
    Rng rng(3);
    SCOPED_TRACE(render(spec));
    expect_standardized(generate_dataset(spec, rng), 0.02);
  }
}

TEST(Dataset, MixtureMeansSitOnEquallySpacedAngles) {
  DatasetSpec spec{GaussianMixture{8, 4.0, 1e-9}, 5000};
  Rng rng(4);
  const auto s = generate_dataset(spec, rng);
  std::vector<int> hits(8, 0);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    const double angle = std::atan2(s(r, 1), s(r, 0));
    const double slot = angle / (2 * std::numbers::pi / 8);
    const double nearest = std::round(slot);
    ASSERT_NEAR(slot, nearest, 1e-6);
    ++hits[static_cast<int>((static_cast<long>(nearest) % 8 + 8) % 8)];
  }
  for (int h : hits) EXPECT_GT(h, 500);
}

TEST(Dataset, DeterministicPerSeedAndStream) {
  DatasetSpec spec{TwoMoons{0.1}, 1000};
  Rng a(5), b(5), c(6);
  const auto x = generate_dataset(spec, a);
  EXPECT_EQ(x, generate_dataset(spec, b));
  EXPECT_NE(x, generate_dataset(spec, c));
}

TEST(Dataset, CheckerboardStaysOnBlackCells) {
  DatasetSpec spec{Checkerboard{4}, 20000};
  Rng rng(7);
  const auto s = generate_dataset(spec, rng);
  const auto m = population_moments(spec);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    const double x = s(r, 0) * m.stddev[0] + m.mean[0];
    const double y = s(r, 1) * m.stddev[1] + m.mean[1];
    ASSERT_LE(std::abs(x), 1.0 + 1e-12);
    ASSERT_LE(std::abs(y), 1.0 + 1e-12);
    const int i = std::min(3, static_cast<int>((x + 1.0) / 0.5));
    const int j = std::min(3, static_cast<int>((y + 1.0) / 0.5));
    ASSERT_EQ((i + j) % 2, 0) << x << " " << y;
  }
}

TEST(Dataset, DescriptorRoundTrip) {
  for (const char* text : {"gmm(k=8,radius=4,sigma=0.3,n=65536)", "moons(noise=0.05,n=100)", "checkerboard(cells=6,n=10)",
                           "point(x=0.5:-1,n=4)"}) {
    const auto spec = parse_dataset(text);
    EXPECT_EQ(parse_dataset(render(spec)), spec) << text;
  }
  EXPECT_EQ(parse_dataset("gmm"), DatasetSpec{});
  const auto p = parse_dataset("point(x=2)");
  EXPECT_EQ(std::get<SinglePoint>(p.shape).x0, (std::vector<double>{2.0}));
  EXPECT_EQ(p.dim(), 1u);
}

TEST(Dataset, RejectsInvalidSpecs) {
  for (const char* bad : {"gmm(k=0)", "gmm(sigma=0)", "gmm(radius=-1)", "moons(noise=-0.1)", "checkerboard(cells=0)",
                          "point(x=)", "gmm(n=0)", "spiral", "gmm(k=3,foo=1)"})
    EXPECT_THROW(parse_dataset(bad), Error) << bad;
}

}  // namespace
}  // namespace flowcurl
