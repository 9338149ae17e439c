#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowcurl/config.hpp"
#include "flowcurl/flow_path.hpp"
#include "flowcurl/loss_profile.hpp"
#include "flowcurl/matrix.hpp"
#include "flowcurl/metrics.hpp"
#include "flowcurl/mlp.hpp"
#include "flowcurl/ode.hpp"
#include "flowcurl/optim.hpp"

namespace flowcurl {

/// Sample sizes and switches for checkpoint evaluation.
struct EvalSettings {
  std::size_t n_generated = 8192;
  std::size_t n_holdout = 8192;
  std::size_t n_proj = 128;
  /// Leading rows of each set used by the O(n^2) energy distance and MMD.
  std::size_t pairwise_rows = 1024;
  /// Evaluate the EMA shadow (default) or the raw parameters.
  bool use_ema = true;
};

struct EvalMetrics {
  double sw2 = 0.0;
  double energy = 0.0;
  double mmd = 0.0;
};

struct RunLogRow {
  std::uint64_t step = 0;  // optimizer updates completed
  double train_loss = 0.0;
  double lr = 0.0;
  int phase = 1;
  std::optional<EvalMetrics> metrics;
  std::int64_t wall_ms = 0;

  friend bool operator==(const RunLogRow&, const RunLogRow&) = default;
};

inline bool operator==(const EvalMetrics& a, const EvalMetrics& b) {
  return a.sw2 == b.sw2 && a.energy == b.energy && a.mmd == b.mmd;
}

/// One row per optimizer step; metric columns are filled at evaluation steps only.
struct RunLog {
  std::vector<RunLogRow> rows;

  static constexpr const char* kHeader = "step,train_loss,lr,phase,sw2,energy_dist,mmd,wall_ms";

  std::string to_csv() const;
  static RunLog from_csv(std::string_view text);
  static RunLog load(const std::filesystem::path& path);

  /// Rows that carry metrics, in step order.
  std::vector<RunLogRow> eval_rows() const;
};

/// Windowed online loss profile, reset after every evaluation.
struct ProfileSnapshot {
  std::uint64_t eval_step = 0;
  LossProfile profile;
};

struct TrainOptions {
  /// When set, artifacts (config.ini, run_log.csv, loss_profile.csv, phase_profile.csv,
  /// timing.csv, latest.fcw, best.fcw) are written here.
  std::optional<std::filesystem::path> run_dir;
  bool evaluate = true;
  EvalSettings eval;
  /// Fill wall_ms with elapsed wall-clock time. Off by default so logs are reproducible.
  bool record_wallclock = false;
  /// Called after every step with the sampled times and unweighted squared residuals.
  std::function<void(std::uint64_t step, std::span<const double> t, std::span<const double> sq_err)> on_step;
  std::function<void(const RunLogRow&)> on_eval;
};

struct StepStats {
  std::uint64_t step = 0;
  double loss = 0.0;
  double lr = 0.0;
  int phase = 1;
};

/// Owns the model, optimizer, data cache and RNG streams of one run.
class Trainer {
 public:
  explicit Trainer(TrainConfig cfg);

  /// One optimizer update. Throws TrainingDiverged on a non-finite loss or gradient.
  StepStats step();
  /// Metrics for the current (EMA or raw) parameters against `holdout`.
  EvalMetrics evaluate(const SampleSet& holdout, const EvalSettings& settings) const;

  std::uint64_t steps_done() const noexcept { return steps_done_; }
  const TrainConfig& config() const noexcept { return cfg_; }
  const MlpConfig& model() const noexcept { return model_; }
  const ParamVector& params() const noexcept { return params_; }
  const EmaState& ema() const noexcept { return ema_; }
  const AdamState& adam() const noexcept { return adam_; }
  const SampleSet& data() const noexcept { return data_; }
  const std::vector<double>& last_times() const noexcept { return times_; }
  const std::vector<double>& last_sq_err() const noexcept { return sq_err_; }

  LossProfile& window_profile() noexcept { return window_; }
  const std::array<LossProfile, 2>& phase_profiles() const noexcept { return phase_profiles_; }

 private:
  TrainConfig cfg_;
  MlpConfig model_;
  const PathSchedule* path_;
  SampleSet data_;
  ParamVector params_;
  AdamState adam_;
  EmaState ema_;
  Rng batch_rng_;
  Rng t_rng_;
  Rng noise_rng_;
  std::uint64_t steps_done_ = 0;
  LossProfile window_;
  std::array<LossProfile, 2> phase_profiles_;
  Matrix z_;
  Matrix target_;
  Matrix out_grad_;
  std::vector<double> times_;
  std::vector<double> sq_err_;
};

struct TrainResult {
  RunLog log;
  std::vector<ProfileSnapshot> profiles;
  std::array<LossProfile, 2> phase_profiles;
  ParamVector params;
  EmaState ema;
  AdamState adam;
  std::optional<std::uint64_t> best_step;
  std::optional<double> best_sw2;
};

TrainResult train(const TrainConfig& cfg, const TrainOptions& options = {});

/// Held-out evaluation set for a config: a fresh stream of the same standardized law.
SampleSet holdout_set(const TrainConfig& cfg, std::size_t n);

/// sw2 / energy / MMD between generated samples and held-out data.
EvalMetrics evaluate_samples(const SampleSet& generated, const SampleSet& holdout,
                             const EvalSettings& settings, std::uint64_t seed);

/// n points i / (n - 1).
std::vector<double> uniform_grid(std::size_t n);

/// Monte-Carlo estimate of E |v(z_t, t) - v_t(z_t | x)|^2 at each grid time, with x drawn
/// from `data` and eps ~ N(0, I) fresh per grid point. `stddev` holds the per-sample spread.
struct OfflineProfile {
  std::vector<ProfilePoint> points;
  std::vector<double> stddev;
};

OfflineProfile evaluate_loss_profile(const VelocityField& field, const SampleSet& data,
                                     std::span<const double> grid, std::size_t n_mc, Rng& rng,
                                     const PathSchedule& sched = rectified_linear());

/// `eval_step,t,loss_mean,loss_count`, one row per (snapshot, bin); empty mean when count is 0.
std::string render_profile_csv(const std::vector<ProfileSnapshot>& snapshots);
std::vector<ProfileSnapshot> parse_profile_csv(std::string_view text);
/// `phase,t,loss_mean,loss_count`.
std::string render_phase_profile_csv(const std::array<LossProfile, 2>& phases);
std::array<LossProfile, 2> parse_phase_profile_csv(std::string_view text);

}  // namespace flowcurl
