#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "flowcurl/csv.hpp"
#include "flowcurl/error.hpp"
#include "flowcurl/sweep.hpp"
#include "test_support.hpp"

namespace flowcurl {
namespace {

const char* kBase =
    "[base]\n"
    "dataset = gmm(k=4,radius=2,sigma=0.3,n=2048)\n"
    "hidden = 16,16\n"
    "time_features = 4\n"
    "batch_size = 32\n"
    "total_steps = 20\n"
    "warmup = 2\n"
    "eval_every = 10\n"
    "nfe = 4\n";

TEST(SweepSpec, ParsesEntries) {
  const auto spec = parse_sweep_spec(std::string(kBase) +
                                     "[sweep]\nseeds = 2\n"
                                     "[entry]\nlabel = uni\np1 = uniform\n"
                                     "[entry]\nlabel = cur\np1 = logitnormal(mu=0.8,sigma=1)\np2 = uniform\nts = 0.4\n");
  EXPECT_EQ(spec.n_seeds, 2u);
  EXPECT_EQ(spec.base.total_steps, 20u);
  ASSERT_EQ(spec.entries.size(), 2u);
  EXPECT_EQ(spec.entries[0].sampler(20), TimestepDistribution(Uniform{}));
  const auto cur = std::get<Curriculum>(spec.entries[1].sampler(20000));
  EXPECT_EQ(cur.switch_step, 8000u);
  EXPECT_EQ(cur.phase1, StaticDistribution(LogitNormal{0.8, 1.0}));
  EXPECT_EQ(cur.phase2, StaticDistribution(Uniform{}));
}

TEST(SweepSpec, DefaultGrid) {
  const auto spec = parse_sweep_spec(kBase);
  EXPECT_EQ(spec.entries.size(), 26u);
  EXPECT_EQ(spec.n_seeds, 3u);
  EXPECT_EQ(default_sweep_entries().size(), 26u);
}

TEST(SweepSpec, Rejections) {
  EXPECT_THROW(parse_sweep_spec("[entry]\nlabel = a\np1 = uniform\n[entry]\nlabel = a\np1 = uniform\n"), FormatError);
  EXPECT_THROW(parse_sweep_spec("[entry]\nlabel = a\n"), FormatError);
  EXPECT_THROW(parse_sweep_spec("[entry]\nlabel = a\np1 = uniform\ncolour = red\n"), FormatError);
  EXPECT_THROW(parse_sweep_spec("[other]\n"), FormatError);
  EXPECT_THROW(parse_sweep_spec("[sweep]\nseeds = 0\n"), DomainError);
  EXPECT_THROW(parse_sweep_spec("[entry]\nlabel = a\np1 = uniform\np2 = uniform\nts = 1.5\n"), DomainError);
}

TEST(BestCheckpoint, FirstMinimum) {
  RunLog log;
  log.rows = {{1, 1, 1, 1, EvalMetrics{0.5, 0, 0}, 0},
              {2, 1, 1, 1, std::nullopt, 0},
              {3, 1, 1, 1, EvalMetrics{0.2, 0, 0}, 0},
              {4, 1, 1, 1, EvalMetrics{0.2, 0, 0}, 0},
              {5, 1, 1, 1, EvalMetrics{0.3, 0, 0}, 0}};
  const auto b = best_checkpoint(log);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->first, 3u);
  EXPECT_EQ(b->second, 0.2);
  EXPECT_FALSE(best_checkpoint(RunLog{}).has_value());
}

TEST(RunTraining, SkipsFinishedRunsUnlessForced) {
  testing::TempDir dir;
  auto cfg = parse_sweep_spec(kBase).base;
  const auto first = run_training(cfg, dir.path());
  EXPECT_FALSE(first.skipped);
  EXPECT_TRUE(std::filesystem::exists(first.dir / "DONE"));
  EXPECT_EQ(first.dir, dir / run_id(cfg));
  const auto second = run_training(cfg, dir.path());
  EXPECT_TRUE(second.skipped);
  EXPECT_EQ(second.best_step, first.best_step);
  EXPECT_EQ(second.best_sw2, first.best_sw2);
  const auto third = run_training(cfg, dir.path(), true);
  EXPECT_FALSE(third.skipped);
  EXPECT_EQ(third.best_sw2, first.best_sw2);
}

TEST(RunSweep, TwoEntriesAreRankedAndRecomputable) {
  testing::TempDir dir;
  const auto spec = parse_sweep_spec(std::string(kBase) +
                                     "[sweep]\nseeds = 2\n"
                                     "[entry]\nlabel = uni\np1 = uniform\n"
                                     "[entry]\nlabel = cur\np1 = logitnormal(mu=0.8,sigma=1)\np2 = uniform\nts = 0.5\n");
  std::size_t calls = 0;
  const auto summary = run_sweep(spec, dir.path(), false, [&](const SweepRun&) { ++calls; });
  EXPECT_EQ(calls, 4u);
  ASSERT_EQ(summary.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(summary[i].rank, i + 1);
    EXPECT_EQ(summary[i].seeds_ok, 2u);
    ASSERT_TRUE(summary[i].best_metric.has_value());
    ASSERT_TRUE(summary[i].best_step.has_value());
    EXPECT_EQ(summary[i].per_seed.size(), 2u);
  }
  EXPECT_LE(*summary[0].best_metric, *summary[1].best_metric);
  const auto runs = parse_runs_csv(read_text_file(dir / "runs.csv"));
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_EQ(runs[1].seed, spec.base.seed + 1);
  for (const auto& r : runs) EXPECT_EQ(r.status, "ok");
  EXPECT_EQ(render_summary_csv(summarize_sweep(dir.path())), read_text_file(dir / "summary.csv"));
  const auto again = run_sweep(spec, dir.path());
  for (const auto& r : parse_runs_csv(read_text_file(dir / "runs.csv"))) EXPECT_EQ(r.status, "skipped");
  EXPECT_EQ(render_summary_csv(again), render_summary_csv(summary));
}

TEST(RunSweep, SingleEntryAndFailures) {
  testing::TempDir dir;
  auto spec = parse_sweep_spec(std::string(kBase) + "[sweep]\nseeds = 1\n[entry]\nlabel = only\np1 = mode(s=-0.5)\n");
  EXPECT_EQ(run_sweep(spec, dir / "ok").size(), 1u);

  spec.base.dataset = parse_dataset("point(x=1e200:-1e200)");
  const auto failed = run_sweep(spec, dir / "bad");
  ASSERT_EQ(failed.size(), 1u);
  EXPECT_EQ(failed[0].seeds_ok, 0u);
  EXPECT_FALSE(failed[0].best_metric.has_value());
  const auto runs = parse_runs_csv(read_text_file(dir / "bad" / "runs.csv"));
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].status, "failed");
  EXPECT_NE(runs[0].error.find("diverged"), std::string::npos);
}

TEST(ShippedConfigs, AllParse) {
  std::size_t n = 0;
  for (const auto& f : std::filesystem::directory_iterator(FLOWCURL_CONFIG_DIR)) {
    if (f.path().extension() != ".ini") continue;
    ++n;
    if (f.path().stem().string().rfind("sweep", 0) == 0) {
      const auto spec = load_sweep_spec(f.path());
      EXPECT_FALSE(spec.entries.empty()) << f.path();
      for (const auto& e : spec.entries) EXPECT_NO_THROW(e.validate()) << e.label;
    } else {
      EXPECT_NO_THROW(load_config(f.path()).validate()) << f.path();
    }
  }
  EXPECT_GE(n, 4u);
  const auto desk = load_config(std::filesystem::path(FLOWCURL_CONFIG_DIR) / "desk.ini");
  EXPECT_EQ(desk, TrainConfig{});
  const auto cur = load_config(std::filesystem::path(FLOWCURL_CONFIG_DIR) / "curriculum.ini");
  EXPECT_EQ(std::get<Curriculum>(cur.sampler).switch_step, 8000u);
}

TEST(RunsCsv, RoundTrip) {
  const std::vector<SweepRun> runs{{"a,b", "uniform", 3, "00ff", "ok", ""},
                                   {"c", "mode(s=-0.5)", 4, "abcd", "failed", "line \"1\"\nbad"}};
  const auto back = parse_runs_csv(render_runs_csv(runs));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].label, "a,b");
  EXPECT_EQ(back[1].error, runs[1].error);
  EXPECT_EQ(back[1].seed, 4u);
}

}  // namespace
}  // namespace flowcurl
