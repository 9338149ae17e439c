#include <gtest/gtest.h>

#include <cmath>
#include "flowcurl/config.hpp"
#include "flowcurl/error.hpp"
#include "flowcurl/rng.hpp"

namespace flowcurl {
namespace {

StaticDistribution random_static(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return Uniform{};
    case 1: return Mode{-0.9 + 3 * rng.uniform()};
    default: return LogitNormal{-2 + 4 * rng.uniform(), 0.1 + 2 * rng.uniform()};
  }
}

TrainConfig random_config(Rng& rng) {
  TrainConfig c;
  switch (rng.below(4)) {
    case 0: c.dataset.shape = GaussianMixture{1 + rng.below(12), 5 * rng.uniform(), 0.01 + rng.uniform()}; break;
    case 1: c.dataset.shape = TwoMoons{rng.uniform()}; break;
    case 2: c.dataset.shape = Checkerboard{1 + rng.below(8)}; break;
    default: c.dataset.shape = SinglePoint{{rng.normal(), rng.normal()}};
  }
  c.dataset.n_cache = 1 + rng.below(100000);
  c.hidden.clear();
  for (std::uint64_t k = rng.below(4); k > 0; --k) c.hidden.push_back(1 + rng.below(300));
  c.time_features = rng.below(16);
  c.activation = rng.below(2) ? Activation::kSiLU : Activation::kTanh;
  if (rng.below(2))
    c.sampler = Curriculum{random_static(rng), random_static(rng), rng.below(50000)};
  else
    c.sampler = to_timestep(random_static(rng));
  c.batch_size = 1 + rng.below(2048);
  c.total_steps = 1 + rng.below(200000);
  c.lr = 1e-5 + rng.uniform() * 1e-2;
  c.warmup = rng.below(20000);
  c.ema_decay = rng.uniform() * 0.9999;
  c.adaptive_p = rng.below(2) ? 0.0 : rng.uniform();
  c.adaptive_c = 1e-6 + rng.uniform();
  c.eval_every = 1 + rng.below(5000);
  c.nfe = 1 + rng.below(200);
  c.profile_bins = 2 + rng.below(200);
  c.seed = rng.next();
  return c;
}

TEST(Config, RenderParseRoundTrip) {
  Rng rng(77);
  for (int k = 0; k < 300; ++k) {
    const auto c = random_config(rng);
    const auto text = render(c);
    EXPECT_EQ(parse_config(text), c) << text;
    EXPECT_EQ(render(parse_config(text)), text);
  }
}

TEST(Config, DefaultsAreTheDeskRecipe) {
  const TrainConfig c;
  EXPECT_EQ(c.hidden, (std::vector<std::size_t>{256, 256, 256}));
  EXPECT_EQ(c.batch_size, 256u);
  EXPECT_EQ(c.total_steps, 20000u);
  EXPECT_EQ(c.lr, 1e-3);
  EXPECT_EQ(c.warmup, 500u);
  EXPECT_EQ(c.ema_decay, 0.999);
  EXPECT_EQ(c.nfe, 50u);
  EXPECT_FALSE(c.adaptive_weighting());
  EXPECT_EQ(apply_preset(TrainConfig{}, "desk"), c);
}

TEST(Config, Presets) {
  const auto w = apply_preset(TrainConfig{}, "paper-weighting");
  EXPECT_EQ(w.adaptive_p, 0.75);
  EXPECT_EQ(w.adaptive_c, 1e-3);
  const auto s = apply_preset(TrainConfig{}, "paper-scale");
  EXPECT_EQ(s.batch_size, 1024u);
  EXPECT_EQ(s.lr, 6e-4);
  EXPECT_EQ(s.warmup, 10000u);
  EXPECT_EQ(s.ema_decay, 0.99995);
  EXPECT_EQ(s.total_steps, 150000u);
  EXPECT_THROW(apply_preset(TrainConfig{}, "huge"), FormatError);
}

TEST(Config, PartialFileOverridesBase) {
  const auto c = parse_config("# comment\n[sampler]\nsampler = logitnormal(mu=-0.4,sigma=1)\n\n[run]\nseed = 3\n");
  EXPECT_EQ(c.sampler, TimestepDistribution(LogitNormal{-0.4, 1.0}));
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.batch_size, 256u);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("bogus = 1\n"), FormatError);
  EXPECT_THROW(parse_config("seed = 1\nseed = 2\n"), FormatError);
  EXPECT_THROW(parse_config("[run\n"), FormatError);
  EXPECT_THROW(parse_config("just text\n"), FormatError);
  EXPECT_THROW(parse_config("lr = fast\n"), FormatError);
  EXPECT_THROW(parse_config("sampler = mode(s=-1)\n"), FormatError);
  try {
    parse_config("seed = 1\n\nbatch_size = x\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  TrainConfig c;
  c.total_steps = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = TrainConfig{};
  c.ema_decay = 1.0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Config, RunIdDependsOnEveryField) {
  TrainConfig a;
  const auto id = run_id(a);
  EXPECT_EQ(id.size(), 16u);
  EXPECT_EQ(run_id(TrainConfig{}), id);
  TrainConfig b = a;
  b.seed = 1;
  EXPECT_NE(run_id(b), id);
  b = a;
  b.sampler = Mode{-0.5};
  EXPECT_NE(run_id(b), id);
}

}  // namespace
}  // namespace flowcurl
