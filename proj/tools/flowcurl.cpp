#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "flowcurl/checkpoint.hpp"
#include "flowcurl/config.hpp"
#include "flowcurl/csv.hpp"
#include "flowcurl/dataset.hpp"
#include "flowcurl/descriptor.hpp"
#include "flowcurl/error.hpp"
#include "flowcurl/metrics.hpp"
#include "flowcurl/ode.hpp"
#include "flowcurl/plot.hpp"
#include "flowcurl/sweep.hpp"
#include "flowcurl/trainer.hpp"

namespace fc = flowcurl;
using fc::descriptor::format_real;

namespace {

const fc::ParamVector& eval_params(const fc::Checkpoint& ckpt, bool raw) {
  return raw || !ckpt.ema ? ckpt.params : ckpt.ema->shadow;
}

std::optional<fc::TrainConfig> checkpoint_config(const fc::Checkpoint& ckpt) {
  if (ckpt.config_text.empty()) return std::nullopt;
  return fc::parse_config(ckpt.config_text);
}

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "runs";
  std::string preset;
  bool force = false;
  bool wallclock = false;
  bool no_eval = false;
};

int cmd_train(const TrainArgs& a) {
  fc::TrainConfig base = a.preset.empty() ? fc::TrainConfig{} : fc::apply_preset({}, a.preset);
  fc::TrainConfig cfg = fc::load_config(a.config, base);
  if (a.seed) cfg.seed = *a.seed;
  fc::TrainOptions options;
  options.record_wallclock = a.wallclock;
  options.evaluate = !a.no_eval;
  options.on_eval = [&](const fc::RunLogRow& row) {
    std::cerr << "step " << row.step << "/" << cfg.total_steps << "  loss " << format_real(row.train_loss);
    if (row.metrics) std::cerr << "  sw2 " << format_real(row.metrics->sw2);
    std::cerr << '\n';
  };
  const auto outcome = fc::run_training(cfg, a.out, a.force, options);
  if (outcome.skipped) std::cerr << "already complete, skipping (use --force to rerun)\n";
  std::cout << "run_dir = " << outcome.dir.string() << '\n';
  if (outcome.best_sw2)
    std::cout << "best_sw2 = " << format_real(*outcome.best_sw2) << "\nbest_step = " << *outcome.best_step << '\n';
  return 0;
}

struct SampleArgs {
  std::string ckpt;
  std::size_t n = 0;
  std::size_t nfe = 0;
  std::string out;
  std::uint64_t seed = 0;
  bool raw = false;
};

int cmd_sample(const SampleArgs& a) {
  const auto ckpt = fc::read_checkpoint(a.ckpt);
  fc::Rng rng(a.seed, fc::Stream::kUser);
  const auto samples = fc::batch_generate(eval_params(ckpt, a.raw), ckpt.model, a.n, {a.nfe}, rng);
  if (a.out.empty()) {
    fc::write_samples_csv(std::cout, samples);
  } else if (a.out.ends_with(".fcs")) {
    fc::write_samples_binary(a.out, samples);
  } else {
    fc::write_samples_csv(std::filesystem::path(a.out), samples);
  }
  return 0;
}

struct EvalArgs {
  std::string ckpt;
  std::string dataset;
  std::string metric = "all";
  std::size_t n = 8192;
  std::optional<std::size_t> nfe;
  std::uint64_t seed = 0;
  bool raw = false;
};

int cmd_eval(const EvalArgs& a) {
  const auto ckpt = fc::read_checkpoint(a.ckpt);
  const auto spec = fc::parse_dataset(a.dataset);
  if (spec.dim() != ckpt.model.in_dim) throw fc::ShapeError("dataset dimension does not match the checkpoint");
  const auto cfg = checkpoint_config(ckpt);
  const std::size_t nfe = a.nfe.value_or(cfg ? cfg->nfe : 50);

  fc::TrainConfig holdout_cfg;
  holdout_cfg.dataset = spec;
  holdout_cfg.seed = a.seed;
  fc::EvalSettings settings;
  settings.n_generated = a.n;
  settings.n_holdout = a.n;
  const auto holdout = fc::holdout_set(holdout_cfg, a.n);
  fc::Rng noise(a.seed, fc::Stream::kEvalNoise);
  const auto generated = fc::batch_generate(eval_params(ckpt, a.raw), ckpt.model, a.n, {nfe}, noise);

  fc::Rng proj(a.seed, fc::Stream::kEvalProjection);
  const auto head = [&](const fc::Matrix& m) { return m.slice_rows(0, std::min(settings.pairwise_rows, m.rows())); };
  if (a.metric == "sw2" || a.metric == "all")
    std::cout << "sw2 = " << format_real(fc::sliced_w2(generated, holdout, settings.n_proj, proj)) << '\n';
  if (a.metric == "energy" || a.metric == "all")
    std::cout << "energy = " << format_real(fc::energy_distance(head(generated), head(holdout))) << '\n';
  if (a.metric == "mmd" || a.metric == "all")
    std::cout << "mmd = " << format_real(fc::mmd_rbf(head(generated), head(holdout))) << '\n';
  return 0;
}

struct ProfileArgs {
  std::string ckpt;
  std::size_t grid = 101;
  std::size_t mc = 4096;
  std::string dataset;
  std::string out;
  std::uint64_t seed = 0;
  bool raw = false;
};

int cmd_loss_profile(const ProfileArgs& a) {
  const auto ckpt = fc::read_checkpoint(a.ckpt);
  const auto cfg = checkpoint_config(ckpt);
  fc::DatasetSpec spec;
  if (!a.dataset.empty()) {
    spec = fc::parse_dataset(a.dataset);
  } else if (cfg) {
    spec = cfg->dataset;
  } else {
    throw fc::InputError("checkpoint carries no config; pass --dataset");
  }
  fc::Rng data_rng(a.seed, fc::Stream::kHoldout);
  const auto data = fc::generate_dataset(spec, data_rng);
  const auto grid = fc::uniform_grid(a.grid);
  fc::Rng rng(a.seed, fc::Stream::kProfile);
  const auto profile = fc::evaluate_loss_profile(fc::mlp_field(eval_params(ckpt, a.raw), ckpt.model), data, grid,
                                                 a.mc, rng);
  std::ostringstream csv;
  csv << "t,loss_mean,loss_std,n_mc\n";
  for (std::size_t i = 0; i < profile.points.size(); ++i) {
    const auto& p = profile.points[i];
    csv << format_real(p.t) << ',' << format_real(p.loss) << ',' << format_real(profile.stddev[i]) << ',' << p.count
        << '\n';
  }
  const double ratio = fc::u_shape_ratio(profile.points);
  if (a.out.empty()) {
    std::cout << csv.str();
    std::cerr << "u_shape_ratio = " << format_real(ratio) << '\n';
  } else {
    fc::write_text_file(a.out, csv.str());
    std::cout << "u_shape_ratio = " << format_real(ratio) << '\n';
  }
  return 0;
}

struct SweepArgs {
  std::string spec;
  std::optional<std::size_t> seeds;
  std::string out = "sweeps";
  bool force = false;
};

int cmd_sweep(const SweepArgs& a) {
  auto spec = fc::load_sweep_spec(a.spec);
  if (a.seeds) spec.n_seeds = *a.seeds;
  const auto summary = fc::run_sweep(spec, a.out, a.force, [](const fc::SweepRun& run) {
    std::cerr << run.label << " seed " << run.seed << ": " << run.status;
    if (!run.error.empty()) std::cerr << " (" << run.error << ")";
    std::cerr << '\n';
  });
  std::cout << fc::render_summary_csv(summary);
  return 0;
}

int cmd_plot(const std::string& run) {
  for (const auto& path : fc::emit_plots(run)) std::cout << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowcurl: flow-matching timestep sampling workbench"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* sub_train = app.add_subcommand("train", "Train a model from a config file");
  sub_train->add_option("--config", train.config, "Config file")->required()->check(CLI::ExistingFile);
  sub_train->add_option("--seed", train.seed, "Override the config seed");
  sub_train->add_option("--out", train.out, "Output root; the run lands in <out>/<run-id>/");
  sub_train->add_option("--preset", train.preset, "Start from a named preset (desk, paper-weighting, paper-scale)");
  sub_train->add_flag("--force", train.force, "Rerun even if the run already completed");
  sub_train->add_flag("--wallclock", train.wallclock, "Record elapsed time in the run log");
  sub_train->add_flag("--no-eval", train.no_eval, "Skip periodic evaluation");

  SampleArgs sample;
  auto* sub_sample = app.add_subcommand("sample", "Generate samples from a checkpoint");
  sub_sample->add_option("--ckpt", sample.ckpt)->required()->check(CLI::ExistingFile);
  sub_sample->add_option("--n", sample.n)->required()->check(CLI::PositiveNumber);
  sub_sample->add_option("--nfe", sample.nfe)->required()->check(CLI::PositiveNumber);
  sub_sample->add_option("--out", sample.out, "Output file (.csv or .fcs); stdout CSV when omitted");
  sub_sample->add_option("--seed", sample.seed);
  sub_sample->add_flag("--raw", sample.raw, "Use raw weights instead of the EMA shadow");

  EvalArgs eval;
  auto* sub_eval = app.add_subcommand("eval", "Score a checkpoint against fresh data");
  sub_eval->add_option("--ckpt", eval.ckpt)->required()->check(CLI::ExistingFile);
  sub_eval->add_option("--dataset", eval.dataset, "Dataset descriptor, e.g. gmm(k=8,radius=4,sigma=0.3)")->required();
  sub_eval->add_option("--metric", eval.metric)->check(CLI::IsMember({"sw2", "energy", "mmd", "all"}));
  sub_eval->add_option("--n", eval.n)->check(CLI::Range(2, 1 << 24));
  sub_eval->add_option("--nfe", eval.nfe)->check(CLI::PositiveNumber);
  sub_eval->add_option("--seed", eval.seed);
  sub_eval->add_flag("--raw", eval.raw);

  ProfileArgs prof;
  auto* sub_prof = app.add_subcommand("loss-profile", "Monte-Carlo loss against t on a uniform grid");
  sub_prof->add_option("--ckpt", prof.ckpt)->required()->check(CLI::ExistingFile);
  sub_prof->add_option("--grid", prof.grid)->check(CLI::Range(11, 100000));
  sub_prof->add_option("--mc", prof.mc)->check(CLI::PositiveNumber);
  sub_prof->add_option("--dataset", prof.dataset, "Override the dataset stored in the checkpoint");
  sub_prof->add_option("--out", prof.out, "CSV output file");
  sub_prof->add_option("--seed", prof.seed);
  sub_prof->add_flag("--raw", prof.raw);

  SweepArgs sweep;
  auto* sub_sweep = app.add_subcommand("sweep", "Run a grid of samplers over several seeds");
  sub_sweep->add_option("--spec", sweep.spec)->required()->check(CLI::ExistingFile);
  sub_sweep->add_option("--seeds", sweep.seeds)->check(CLI::PositiveNumber);
  sub_sweep->add_option("--out", sweep.out);
  sub_sweep->add_flag("--force", sweep.force);

  std::string plot_run;
  auto* sub_plot = app.add_subcommand("plot", "Write SVG charts for a run directory");
  sub_plot->add_option("--run", plot_run)->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sub_train) return cmd_train(train);
    if (*sub_sample) return cmd_sample(sample);
    if (*sub_eval) return cmd_eval(eval);
    if (*sub_prof) return cmd_loss_profile(prof);
    if (*sub_sweep) return cmd_sweep(sweep);
    if (*sub_plot) return cmd_plot(plot_run);
  } catch (const std::exception& e) {
    std::cerr << "flowcurl: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
