#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowcurl/config.hpp"
#include "flowcurl/timestep.hpp"
#include "flowcurl/trainer.hpp"

namespace flowcurl {

struct RunOutcome {
  std::string run_id;
  std::filesystem::path dir;
  bool skipped = false;  // an earlier identical run was found
  std::optional<std::uint64_t> best_step;
  std::optional<double> best_sw2;
};

/// Trains into `<out_root>/<run-id>/` and drops a DONE marker at the end. If DONE already
/// exists the run is skipped (unless `force`) and the outcome is read back from run_log.csv.
RunOutcome run_training(const TrainConfig& cfg, const std::filesystem::path& out_root, bool force = false,
                        TrainOptions options = {});

/// Smallest sw2 among evaluated rows and the first step attaining it.
std::optional<std::pair<std::uint64_t, double>> best_checkpoint(const RunLog& log);

struct SweepEntry {
  std::string label;
  StaticDistribution p1 = Uniform{};
  std::optional<StaticDistribution> p2;  // absent: static p1
  double ts_fraction = 0.0;              // switch step as a fraction of total_steps

  TimestepDistribution sampler(std::uint64_t total_steps) const;
  void validate() const;
};

struct SweepSpec {
  TrainConfig base;
  std::vector<SweepEntry> entries;
  std::size_t n_seeds = 3;  // seeds are base.seed, base.seed + 1, ...
};

/// Three p1 log-normals x {Uniform, Mode(-0.5)} x four switch fractions, plus static
/// Uniform and static LN(-0.8, 1).
std::vector<SweepEntry> default_sweep_entries();

/// `[base]` holds config keys, each `[entry]` holds `label`, `p1`, optional `p2` and `ts`
/// (a fraction), `[sweep]` may set `seeds`. With no entries the default grid is used.
SweepSpec parse_sweep_spec(std::string_view text);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// One line of runs.csv.
struct SweepRun {
  std::string label;
  std::string sampler;
  std::uint64_t seed = 0;
  std::string run_id;
  std::string status;  // "ok", "skipped" or "failed"
  std::string error;
};

/// One line of summary.csv, aggregated over seeds.
struct SweepSummaryRow {
  std::size_t rank = 0;
  std::string label;
  std::string sampler;
  std::size_t seeds_ok = 0;
  std::optional<double> best_metric;  // median over seeds of each run's best sw2
  std::optional<double> best_step;    // median over seeds of the step of that best
  std::vector<double> per_seed;
};

/// Runs every (entry, seed) pair in sequence under `out_root`. A failing run is recorded and
/// the sweep continues. Writes runs.csv and summary.csv; returns the summary.
std::vector<SweepSummaryRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_root,
                                       bool force = false,
                                       const std::function<void(const SweepRun&)>& progress = {});

std::string render_runs_csv(const std::vector<SweepRun>& runs);
std::vector<SweepRun> parse_runs_csv(std::string_view text);

/// Recomputes the ranked summary from runs.csv and each run's run_log.csv.
std::vector<SweepSummaryRow> summarize_sweep(const std::filesystem::path& out_root);
std::string render_summary_csv(const std::vector<SweepSummaryRow>& rows);

}  // namespace flowcurl
