#include "flowcurl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "flowcurl/checkpoint.hpp"
#include "flowcurl/csv.hpp"
#include "flowcurl/descriptor.hpp"
#include "flowcurl/error.hpp"

namespace flowcurl {
namespace {

using descriptor::format_real;

std::string metric_field(const std::optional<EvalMetrics>& m, double EvalMetrics::*field) {
  return m ? format_real((*m).*field) : std::string();
}

double parse_metric(const std::string& text) {
  if (text == "inf") return HUGE_VAL;
  if (text == "nan") return std::nan("");
  return descriptor::parse_real(text);
}

Checkpoint make_checkpoint(const Trainer& trainer) {
  Checkpoint ckpt;
  ckpt.model = trainer.model();
  ckpt.params = trainer.params();
  ckpt.ema = trainer.ema();
  ckpt.adam = trainer.adam();
  ckpt.step = trainer.steps_done();
  ckpt.config_text = render(trainer.config());
  return ckpt;
}

}  // namespace

std::string RunLog::to_csv() const {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const auto& r : rows) {
    out << r.step << ',' << format_real(r.train_loss) << ',' << format_real(r.lr) << ',' << r.phase << ','
        << metric_field(r.metrics, &EvalMetrics::sw2) << ',' << metric_field(r.metrics, &EvalMetrics::energy)
        << ',' << metric_field(r.metrics, &EvalMetrics::mmd) << ',' << r.wall_ms << '\n';
  }
  return out.str();
}

RunLog RunLog::from_csv(std::string_view text) {
  const auto table = parse_csv(text);
  std::string header;
  for (std::size_t i = 0; i < table.header.size(); ++i) header += (i ? "," : "") + table.header[i];
  if (header != kHeader) throw FormatError("run log header mismatch: '" + header + "'");
  RunLog log;
  for (const auto& f : table.rows) {
    RunLogRow row;
    row.step = descriptor::parse_uint(f[0]);
    row.train_loss = parse_metric(f[1]);
    row.lr = descriptor::parse_real(f[2]);
    row.phase = static_cast<int>(descriptor::parse_uint(f[3]));
    if (!f[4].empty()) row.metrics = EvalMetrics{parse_metric(f[4]), parse_metric(f[5]), parse_metric(f[6])};
    row.wall_ms = static_cast<std::int64_t>(descriptor::parse_uint(f[7]));
    if (!log.rows.empty() && row.step <= log.rows.back().step)
      throw FormatError("run log steps are not strictly increasing");
    log.rows.push_back(row);
  }
  return log;
}

RunLog RunLog::load(const std::filesystem::path& path) {
  try {
    return from_csv(read_text_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<RunLogRow> RunLog::eval_rows() const {
  std::vector<RunLogRow> out;
  for (const auto& r : rows)
    if (r.metrics) out.push_back(r);
  return out;
}

Trainer::Trainer(TrainConfig cfg)
    : cfg_(std::move(cfg)),
      model_(cfg_.model()),
      path_(&rectified_linear()),
      batch_rng_(cfg_.seed, Stream::kBatch),
      t_rng_(cfg_.seed, Stream::kTimestep),
      noise_rng_(cfg_.seed, Stream::kNoise),
      window_(cfg_.profile_bins),
      phase_profiles_{LossProfile(cfg_.profile_bins), LossProfile(cfg_.profile_bins)} {
  cfg_.validate();
  Rng init_rng(cfg_.seed, Stream::kInit);
  params_ = init_params(model_, init_rng);
  Rng data_rng(cfg_.seed, Stream::kData);
  data_ = generate_dataset(cfg_.dataset, data_rng);
  adam_ = AdamState(params_.size());
  ema_ = make_ema(params_, cfg_.ema_decay);
  const std::size_t b = cfg_.batch_size;
  const std::size_t d = model_.in_dim;
  z_ = Matrix(b, d);
  target_ = Matrix(b, d);
  out_grad_ = Matrix(b, d);
  times_.resize(b);
  sq_err_.resize(b);
}

StepStats Trainer::step() {
  const std::uint64_t s = steps_done_;
  const std::size_t b = cfg_.batch_size;
  const std::size_t d = model_.in_dim;
  const double lr = lr_at({cfg_.lr, cfg_.warmup}, s);
  const int phase = phase_index(cfg_.sampler, s);
  const StaticDistribution law = active_phase(cfg_.sampler, s);

  std::vector<double> eps(d);
  for (std::size_t r = 0; r < b; ++r) {
    const auto x = data_.row(batch_rng_.below(data_.rows()));
    for (auto& e : eps) e = noise_rng_.normal();
    times_[r] = sample_t(law, t_rng_);
    const SamplePair pair{x, eps, times_[r]};
    interpolate_into(*path_, pair, z_.row(r));
    conditional_velocity_into(*path_, pair, target_.row(r));
  }

  const Tape tape = forward(params_, model_, z_, times_);
  const double inv_b = 1.0 / static_cast<double>(b);
  double loss = 0.0;
  for (std::size_t r = 0; r < b; ++r) {
    const auto pred = tape.output.row(r);
    const auto target = target_.row(r);
    const double sq = cfm_residual(pred, target);
    sq_err_[r] = sq;
    if (!std::isfinite(sq))
      throw TrainingDiverged(s + 1, window_.bin_of(times_[r]), params_.norm(), "non-finite residual");
    const double w = cfg_.adaptive_weighting() ? adaptive_weight(sq, cfg_.adaptive_p, cfg_.adaptive_c) : 1.0;
    loss += w * sq;
    auto g = out_grad_.row(r);
    for (std::size_t j = 0; j < d; ++j) g[j] = 2.0 * w * (pred[j] - target[j]) * inv_b;
  }
  loss *= inv_b;
  if (!std::isfinite(loss)) throw TrainingDiverged(s + 1, 0, params_.norm(), "non-finite batch loss");

  const ParamVector grads = backward(params_, model_, tape, out_grad_);
  try {
    adam_step(params_, grads, adam_, lr);
  } catch (const OptimizerError& e) {
    std::size_t worst = 0;
    for (std::size_t r = 1; r < b; ++r)
      if (sq_err_[r] > sq_err_[worst]) worst = r;
    throw TrainingDiverged(s + 1, window_.bin_of(times_[worst]), params_.norm(), e.what());
  }
  ema_update(ema_, params_);

  for (std::size_t r = 0; r < b; ++r) {
    window_.record(times_[r], sq_err_[r]);
    phase_profiles_[static_cast<std::size_t>(phase - 1)].record(times_[r], sq_err_[r]);
  }
  steps_done_ = s + 1;
  return {steps_done_, loss, lr, phase};
}

EvalMetrics Trainer::evaluate(const SampleSet& holdout, const EvalSettings& settings) const {
  const ParamVector& eval_params = settings.use_ema ? ema_.shadow : params_;
  Rng noise(cfg_.seed, Stream::kEvalNoise);
  try {
    const Matrix generated = batch_generate(eval_params, model_, settings.n_generated, {cfg_.nfe}, noise);
    return evaluate_samples(generated, holdout, settings, cfg_.seed);
  } catch (const SolverDivergence&) {
    return {HUGE_VAL, HUGE_VAL, HUGE_VAL};
  }
}

SampleSet holdout_set(const TrainConfig& cfg, std::size_t n) {
  Rng rng(cfg.seed, Stream::kHoldout);
  return generate_dataset(cfg.dataset, rng, n);
}

EvalMetrics evaluate_samples(const SampleSet& generated, const SampleSet& holdout,
                             const EvalSettings& settings, std::uint64_t seed) {
  Rng proj(seed, Stream::kEvalProjection);
  EvalMetrics m;
  m.sw2 = sliced_w2(generated, holdout, settings.n_proj, proj);
  const SampleSet g = generated.slice_rows(0, std::min(settings.pairwise_rows, generated.rows()));
  const SampleSet h = holdout.slice_rows(0, std::min(settings.pairwise_rows, holdout.rows()));
  m.energy = energy_distance(g, h);
  m.mmd = mmd_rbf(g, h, Bandwidth::median());
  return m;
}

TrainResult train(const TrainConfig& cfg, const TrainOptions& options) {
  Trainer trainer(cfg);
  const auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  };

  std::optional<SampleSet> holdout;
  if (options.evaluate) holdout = holdout_set(trainer.config(), options.eval.n_holdout);

  const auto& dir = options.run_dir;
  if (dir) {
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    if (ec) throw IoError(dir->string(), "cannot create run directory: " + ec.message());
    write_text_file(*dir / "config.ini", render(trainer.config()));
  }

  TrainResult result;
  std::ostringstream timing;
  timing << "step,wall_ms\n";
  auto flush_artifacts = [&] {
    if (!dir) return;
    write_text_file(*dir / "run_log.csv", result.log.to_csv());
    write_text_file(*dir / "loss_profile.csv", render_profile_csv(result.profiles));
    write_text_file(*dir / "phase_profile.csv", render_phase_profile_csv(trainer.phase_profiles()));
    write_text_file(*dir / "timing.csv", timing.str());
  };

  result.log.rows.reserve(cfg.total_steps);
  for (std::uint64_t s = 0; s < cfg.total_steps; ++s) {
    const StepStats stats = trainer.step();
    if (options.on_step) options.on_step(stats.step, trainer.last_times(), trainer.last_sq_err());

    RunLogRow row{stats.step, stats.loss, stats.lr, stats.phase, std::nullopt, 0};
    const bool eval_now = stats.step % cfg.eval_every == 0 || stats.step == cfg.total_steps;
    if (eval_now) {
      if (options.evaluate) {
        row.metrics = trainer.evaluate(*holdout, options.eval);
        if (!result.best_sw2 || row.metrics->sw2 < *result.best_sw2) {
          result.best_sw2 = row.metrics->sw2;
          result.best_step = stats.step;
          if (dir) write_checkpoint(*dir / "best.fcw", make_checkpoint(trainer));
        }
      }
      result.profiles.push_back({stats.step, trainer.window_profile()});
      trainer.window_profile().reset();
      if (dir) write_checkpoint(*dir / "latest.fcw", make_checkpoint(trainer));
      const auto ms = elapsed_ms();
      timing << stats.step << ',' << ms << '\n';
      if (options.record_wallclock) row.wall_ms = ms;
      result.log.rows.push_back(row);
      flush_artifacts();
      if (options.on_eval) options.on_eval(row);
      continue;
    }
    if (options.record_wallclock) row.wall_ms = elapsed_ms();
    result.log.rows.push_back(row);
  }

  result.phase_profiles = trainer.phase_profiles();
  result.params = trainer.params();
  result.ema = trainer.ema();
  result.adam = trainer.adam();
  flush_artifacts();
  return result;
}

std::vector<double> uniform_grid(std::size_t n) {
  if (n < 2) throw DomainError("grid needs at least 2 points");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

OfflineProfile evaluate_loss_profile(const VelocityField& field, const SampleSet& data,
                                     std::span<const double> grid, std::size_t n_mc, Rng& rng,
                                     const PathSchedule& sched) {
  if (n_mc == 0) throw DomainError("loss profile needs n_mc >= 1");
  if (data.rows() == 0) throw InputError("loss profile needs data");
  const std::size_t d = data.cols();
  OfflineProfile out;
  Matrix z(n_mc, d);
  Matrix target(n_mc, d);
  Matrix pred;
  std::vector<double> times(n_mc);
  std::vector<double> eps(d);
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("loss profile grid point outside [0, 1]");
    for (std::size_t r = 0; r < n_mc; ++r) {
      const auto x = data.row(rng.below(data.rows()));
      for (auto& e : eps) e = rng.normal();
      const SamplePair pair{x, eps, t};
      interpolate_into(sched, pair, z.row(r));
      conditional_velocity_into(sched, pair, target.row(r));
    }
    std::fill(times.begin(), times.end(), t);
    field(z, times, pred);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t r = 0; r < n_mc; ++r) {
      const double sq = cfm_residual(pred.row(r), target.row(r));
      sum += sq;
      sum_sq += sq * sq;
    }
    const double n = static_cast<double>(n_mc);
    const double mean = sum / n;
    const double var = n_mc > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    out.points.push_back({t, mean, n_mc});
    out.stddev.push_back(std::sqrt(var));
  }
  return out;
}

std::string render_profile_csv(const std::vector<ProfileSnapshot>& snapshots) {
  std::ostringstream out;
  out << "eval_step,t,loss_mean,loss_count\n";
  for (const auto& snap : snapshots) {
    for (std::size_t i = 0; i < snap.profile.bins(); ++i) {
      const auto mean = snap.profile.mean(i);
      out << snap.eval_step << ',' << format_real(snap.profile.center(i)) << ','
          << (mean ? format_real(*mean) : std::string()) << ',' << snap.profile.count(i) << '\n';
    }
  }
  return out.str();
}

namespace {

// Rebuilds profiles from (mean, count) rows; sums are recovered as mean * count.
template <class Key>
std::map<Key, LossProfile> rebuild_profiles(const CsvTable& table, std::size_t key_col) {
  std::map<Key, std::vector<std::pair<double, std::size_t>>> rows;
  const std::size_t mean_col = table.column("loss_mean");
  const std::size_t count_col = table.column("loss_count");
  for (const auto& f : table.rows) {
    const auto key = static_cast<Key>(descriptor::parse_uint(f[key_col]));
    const double mean = f[mean_col].empty() ? 0.0 : descriptor::parse_real(f[mean_col]);
    rows[key].emplace_back(mean, descriptor::parse_uint(f[count_col]));
  }
  std::map<Key, LossProfile> out;
  for (const auto& [key, bins] : rows) {
    LossProfile profile(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const auto [mean, count] = bins[i];
      profile.set_bin(i, mean * static_cast<double>(count), count);
    }
    out.emplace(key, std::move(profile));
  }
  return out;
}

}  // namespace

std::vector<ProfileSnapshot> parse_profile_csv(std::string_view text) {
  const auto table = parse_csv(text);
  std::vector<ProfileSnapshot> out;
  for (auto& [step, profile] : rebuild_profiles<std::uint64_t>(table, table.column("eval_step")))
    out.push_back({step, std::move(profile)});
  return out;
}

std::string render_phase_profile_csv(const std::array<LossProfile, 2>& phases) {
  std::ostringstream out;
  out << "phase,t,loss_mean,loss_count\n";
  for (std::size_t p = 0; p < phases.size(); ++p) {
    for (std::size_t i = 0; i < phases[p].bins(); ++i) {
      const auto mean = phases[p].mean(i);
      out << p + 1 << ',' << format_real(phases[p].center(i)) << ','
          << (mean ? format_real(*mean) : std::string()) << ',' << phases[p].count(i) << '\n';
    }
  }
  return out.str();
}

std::array<LossProfile, 2> parse_phase_profile_csv(std::string_view text) {
  const auto table = parse_csv(text);
  auto profiles = rebuild_profiles<int>(table, table.column("phase"));
  std::array<LossProfile, 2> out{LossProfile(1), LossProfile(1)};
  for (auto& [phase, profile] : profiles) {
    if (phase < 1 || phase > 2) throw FormatError("phase must be 1 or 2");
    out[static_cast<std::size_t>(phase - 1)] = std::move(profile);
  }
  return out;
}

}  // namespace flowcurl
