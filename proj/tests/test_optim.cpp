#include <gtest/gtest.h>

#include <cmath>

#include "flowcurl/error.hpp"
#include "flowcurl/optim.hpp"
#include "flowcurl/rng.hpp"

namespace flowcurl {
namespace {

TEST(LrAt, Examples) {
  EXPECT_EQ(lr_at({1e-3, 0}, 123), 1e-3);
  EXPECT_NEAR(lr_at({6e-4, 10000}, 4999), 3e-4, 1e-18);
  EXPECT_EQ(lr_at({6e-4, 10000}, 9999), 6e-4);
  for (std::uint64_t s : {10000ULL, 10001ULL, 1000000ULL}) EXPECT_EQ(lr_at({6e-4, 10000}, s), 6e-4);
  EXPECT_NEAR(lr_at({1.0, 4}, 0), 0.25, 0.0);
}

TEST(LrAt, LinearAndPositiveDuringWarmup) {
  const LrSchedule s{2e-3, 500};
  for (std::uint64_t k = 0; k < 500; ++k) {
    ASSERT_GT(lr_at(s, k), 0.0);
    ASSERT_NEAR(lr_at(s, k), 2e-3 * static_cast<double>(k + 1) / 500.0, 1e-18);
  }
}

TEST(Adam, ZeroGradLeavesParams) {
  ParamVector p(std::vector<double>{1.0, -2.0, 3.5});
  const ParamVector before = p;
  AdamState st(3);
  adam_step(p, ParamVector(3, 0.0), st, 0.1);
  EXPECT_EQ(p, before);
  EXPECT_EQ(st.step, 1u);
}

TEST(Adam, FirstStepMagnitudeIsLr) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double g = std::ldexp(rng.normal(), static_cast<int>(rng.below(40)) - 20);
    if (g == 0.0) continue;
    ParamVector p(1, 0.0);
    AdamState st(1);
    adam_step(p, ParamVector(1, g), st, 0.01, {0.9, 0.999, 0.0});
    EXPECT_NEAR(std::abs(p.values[0]), 0.01, 1e-15) << g;
    EXPECT_EQ(std::signbit(p.values[0]), !std::signbit(g));
  }
}

TEST(Adam, TwoStepScalarOracle) {
  // Hand simulation in tests/oracles/derived_values.py: g = 0.5 then 0, lr = 0.1.
  ParamVector p(1, 1.0);
  AdamState st(1);
  adam_step(p, ParamVector(1, 0.5), st, 0.1);
  EXPECT_NEAR(1.0 - p.values[0], 0.09999999800000004, 1e-15);
  const double after_first = p.values[0];
  adam_step(p, ParamVector(1, 0.0), st, 0.1);
  EXPECT_NEAR(after_first - p.values[0], 0.067005823517969243, 1e-15);
  EXPECT_NEAR(p.values[0], 0.83299417848203072, 1e-15);
  EXPECT_EQ(st.step, 2u);
}

TEST(Adam, ConvergesOnQuadratic) {
  ParamVector p(1, 1.0);
  AdamState st(1);
  int steps = 0;
  while (std::abs(p.values[0]) >= 1e-3 && steps < 2000) {
    adam_step(p, ParamVector(1, p.values[0]), st, 0.01);
    ++steps;
  }
  EXPECT_LT(std::abs(p.values[0]), 1e-3);
  EXPECT_LE(steps, 2000);
}

TEST(Adam, NonFiniteGradientRefused) {
  ParamVector p(std::vector<double>{1.0, 2.0});
  AdamState st(2);
  adam_step(p, ParamVector(std::vector<double>{0.1, 0.2}), st, 0.1);
  const ParamVector p_before = p;
  const AdamState st_before = st;
  EXPECT_THROW(adam_step(p, ParamVector(std::vector<double>{0.1, std::nan("")}), st, 0.1), OptimizerError);
  EXPECT_THROW(adam_step(p, ParamVector(std::vector<double>{HUGE_VAL, 0.0}), st, 0.1), OptimizerError);
  EXPECT_EQ(p, p_before);
  EXPECT_EQ(st, st_before);
}

TEST(Adam, SecondMomentNonNegativeAndShapesChecked) {
  Rng rng(2);
  ParamVector p(10, 0.0);
  AdamState st(10);
  for (int k = 0; k < 50; ++k) {
    ParamVector g(10);
    for (auto& v : g.values) v = rng.normal();
    adam_step(p, g, st, 1e-2);
    for (double v : st.v) ASSERT_GE(v, 0.0);
  }
  EXPECT_THROW(adam_step(p, ParamVector(9), st, 1e-2), ShapeError);
  EXPECT_THROW(adam_step(p, ParamVector(10), st, 0.0), DomainError);
}

TEST(Ema, Examples) {
  auto ema = make_ema(ParamVector(2, 5.0), 0.0);
  ema_update(ema, ParamVector(std::vector<double>{1.0, -3.0}));
  EXPECT_EQ(ema.shadow, ParamVector(std::vector<double>{1.0, -3.0}));

  auto half = make_ema(ParamVector(1, 0.0), 0.5);
  ema_update(half, ParamVector(1, 2.0));
  EXPECT_EQ(half.shadow.values[0], 1.0);

  EXPECT_THROW(make_ema(ParamVector(1), 1.0), DomainError);
  EXPECT_THROW(make_ema(ParamVector(1), -0.1), DomainError);
  EXPECT_THROW(ema_update(half, ParamVector(2)), ShapeError);
}

TEST(Ema, GeometricApproach) {
  auto ema = make_ema(ParamVector(1, 0.0), 0.9);
  for (int n = 0; n < 10; ++n) ema_update(ema, ParamVector(1, 3.0));
  EXPECT_NEAR(3.0 - ema.shadow.values[0], 1.0460353203, 1e-10);
}

TEST(Ema, ShadowStaysConvexCombination) {
  Rng rng(3);
  for (double decay : {0.0, 0.3, 0.9, 0.999, 0.99995}) {
    ParamVector shadow(64);
    for (auto& v : shadow.values) v = rng.normal() * 1e3;
    auto ema = make_ema(shadow, decay);
    for (int k = 0; k < 20; ++k) {
      ParamVector p(64);
      for (auto& v : p.values) v = rng.normal() * std::ldexp(1.0, static_cast<int>(rng.below(20)));
      const auto prev = ema.shadow;
      ema_update(ema, p);
      for (std::size_t i = 0; i < 64; ++i) {
        ASSERT_LE(std::min(prev.values[i], p.values[i]), ema.shadow.values[i]);
        ASSERT_GE(std::max(prev.values[i], p.values[i]), ema.shadow.values[i]);
      }
    }
  }
}

}  // namespace
}  // namespace flowcurl
