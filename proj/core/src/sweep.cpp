#include "flowcurl/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "flowcurl/csv.hpp"
#include "flowcurl/descriptor.hpp"
#include "flowcurl/error.hpp"

namespace flowcurl {
namespace {

using descriptor::format_real;

constexpr const char* kDoneMarker = "DONE";

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string entry_label(const SweepEntry& e) {
  if (!e.p2) return render(e.p1);
  return render(e.p1) + "->" + render(*e.p2) + "@" + format_real(e.ts_fraction);
}

}  // namespace

std::optional<std::pair<std::uint64_t, double>> best_checkpoint(const RunLog& log) {
  std::optional<std::pair<std::uint64_t, double>> best;
  for (const auto& row : log.rows) {
    if (!row.metrics) continue;
    const double v = row.metrics->sw2;
    if (std::isnan(v)) continue;
    if (!best || v < best->second) best = {row.step, v};
  }
  return best;
}

RunOutcome run_training(const TrainConfig& cfg, const std::filesystem::path& out_root, bool force,
                        TrainOptions options) {
  cfg.validate();
  RunOutcome out;
  out.run_id = run_id(cfg);
  out.dir = out_root / out.run_id;
  const auto done = out.dir / kDoneMarker;
  if (!force && std::filesystem::exists(done)) {
    out.skipped = true;
    if (const auto best = best_checkpoint(RunLog::load(out.dir / "run_log.csv"))) {
      out.best_step = best->first;
      out.best_sw2 = best->second;
    }
    return out;
  }
  std::error_code ec;
  std::filesystem::remove(done, ec);
  options.run_dir = out.dir;
  const TrainResult result = train(cfg, options);
  out.best_step = result.best_step;
  out.best_sw2 = result.best_sw2;
  write_text_file(done, out.run_id + "\n");
  return out;
}

TimestepDistribution SweepEntry::sampler(std::uint64_t total_steps) const {
  if (!p2) return to_timestep(p1);
  const auto ts = static_cast<std::uint64_t>(std::llround(ts_fraction * static_cast<double>(total_steps)));
  return Curriculum{p1, *p2, ts};
}

void SweepEntry::validate() const {
  flowcurl::validate(p1);
  if (p2) flowcurl::validate(*p2);
  if (!(ts_fraction >= 0.0 && ts_fraction <= 1.0)) throw DomainError("ts fraction must lie in [0, 1]");
}

std::vector<SweepEntry> default_sweep_entries() {
  std::vector<SweepEntry> entries;
  const double mus[] = {0.8, -0.4, -0.8};
  const StaticDistribution p2s[] = {Uniform{}, Mode{-0.5}};
  const double fractions[] = {0.33, 0.40, 0.47, 0.53};
  for (double mu : mus)
    for (const auto& p2 : p2s)
      for (double f : fractions) {
        SweepEntry e{"", LogitNormal{mu, 1.0}, p2, f};
        e.label = entry_label(e);
        entries.push_back(e);
      }
  for (const StaticDistribution& p : {StaticDistribution(Uniform{}), StaticDistribution(LogitNormal{-0.8, 1.0})})
    entries.push_back({render(p), p, std::nullopt, 0.0});
  return entries;
}

SweepSpec parse_sweep_spec(std::string_view text) {
  SweepSpec spec;
  for (const auto& section : parse_ini(text)) {
    const auto where = [](const IniEntry& e) { return "line " + std::to_string(e.line) + ": "; };
    if (section.name == "base") {
      std::set<std::string> seen;
      for (const auto& e : section.entries) {
        if (!seen.insert(e.key).second) throw FormatError(where(e) + "duplicate key '" + e.key + "'");
        apply_config_entry(spec.base, e);
      }
    } else if (section.name == "sweep") {
      for (const auto& e : section.entries) {
        if (e.key != "seeds") throw FormatError(where(e) + "unknown sweep key '" + e.key + "'");
        spec.n_seeds = static_cast<std::size_t>(descriptor::parse_uint(e.value));
      }
    } else if (section.name == "entry") {
      SweepEntry entry;
      bool has_p1 = false;
      for (const auto& e : section.entries) {
        try {
          if (e.key == "label") {
            entry.label = e.value;
          } else if (e.key == "p1") {
            entry.p1 = parse_static_distribution(e.value);
            has_p1 = true;
          } else if (e.key == "p2") {
            entry.p2 = parse_static_distribution(e.value);
          } else if (e.key == "ts") {
            entry.ts_fraction = descriptor::parse_real(e.value);
          } else {
            throw FormatError("unknown entry key '" + e.key + "'");
          }
        } catch (const Error& err) {
          throw FormatError(where(e) + err.what());
        }
      }
      if (!has_p1) throw FormatError("sweep entry without p1");
      entry.validate();
      if (entry.label.empty()) entry.label = entry_label(entry);
      spec.entries.push_back(std::move(entry));
    } else {
      throw FormatError("unknown sweep section '[" + section.name + "]'");
    }
  }
  if (spec.entries.empty()) spec.entries = default_sweep_entries();
  std::set<std::string> labels;
  for (const auto& e : spec.entries)
    if (!labels.insert(e.label).second) throw FormatError("duplicate sweep label '" + e.label + "'");
  if (spec.n_seeds == 0) throw DomainError("a sweep needs at least one seed");
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  try {
    return parse_sweep_spec(read_text_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string render_runs_csv(const std::vector<SweepRun>& runs) {
  std::ostringstream out;
  write_csv_row(out, {"label", "sampler", "seed", "run_id", "status", "error"});
  for (const auto& r : runs) write_csv_row(out, {r.label, r.sampler, std::to_string(r.seed), r.run_id, r.status, r.error});
  return out.str();
}

std::vector<SweepRun> parse_runs_csv(std::string_view text) {
  const auto table = parse_csv(text);
  const std::size_t c_label = table.column("label"), c_sampler = table.column("sampler"),
                    c_seed = table.column("seed"), c_id = table.column("run_id"),
                    c_status = table.column("status"), c_error = table.column("error");
  std::vector<SweepRun> runs;
  for (const auto& f : table.rows)
    runs.push_back({f[c_label], f[c_sampler], descriptor::parse_uint(f[c_seed]), f[c_id], f[c_status], f[c_error]});
  return runs;
}

std::vector<SweepSummaryRow> summarize_sweep(const std::filesystem::path& out_root) {
  const auto runs = parse_runs_csv(read_text_file(out_root / "runs.csv"));
  std::vector<std::string> order;
  std::map<std::string, SweepSummaryRow> rows;
  std::map<std::string, std::vector<double>> steps;
  for (const auto& run : runs) {
    auto [it, inserted] = rows.try_emplace(run.label);
    if (inserted) {
      order.push_back(run.label);
      it->second.label = run.label;
      it->second.sampler = run.sampler;
    }
    if (run.status == "failed") continue;
    const auto log_path = out_root / run.run_id / "run_log.csv";
    if (!std::filesystem::exists(log_path)) continue;
    const auto best = best_checkpoint(RunLog::load(log_path));
    if (!best) continue;
    it->second.seeds_ok += 1;
    it->second.per_seed.push_back(best->second);
    steps[run.label].push_back(static_cast<double>(best->first));
  }
  std::vector<SweepSummaryRow> out;
  for (const auto& label : order) {
    auto row = rows.at(label);
    row.best_metric = median(row.per_seed);
    row.best_step = median(steps[label]);
    out.push_back(std::move(row));
  }
  std::stable_sort(out.begin(), out.end(), [](const SweepSummaryRow& a, const SweepSummaryRow& b) {
    if (a.best_metric.has_value() != b.best_metric.has_value()) return a.best_metric.has_value();
    return a.best_metric && *a.best_metric < *b.best_metric;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::string render_summary_csv(const std::vector<SweepSummaryRow>& rows) {
  std::ostringstream out;
  write_csv_row(out, {"rank", "label", "sampler", "seeds_ok", "best_metric", "best_step", "per_seed_best"});
  for (const auto& r : rows) {
    std::string per_seed;
    for (std::size_t i = 0; i < r.per_seed.size(); ++i) per_seed += (i ? ";" : "") + format_real(r.per_seed[i]);
    write_csv_row(out, {std::to_string(r.rank), r.label, r.sampler, std::to_string(r.seeds_ok),
                        r.best_metric ? format_real(*r.best_metric) : "", r.best_step ? format_real(*r.best_step) : "",
                        per_seed});
  }
  return out.str();
}

std::vector<SweepSummaryRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_root, bool force,
                                       const std::function<void(const SweepRun&)>& progress) {
  for (const auto& e : spec.entries) e.validate();
  std::vector<SweepRun> runs;
  for (const auto& entry : spec.entries) {
    for (std::size_t k = 0; k < spec.n_seeds; ++k) {
      TrainConfig cfg = spec.base;
      cfg.sampler = entry.sampler(cfg.total_steps);
      cfg.seed = spec.base.seed + k;
      SweepRun run{entry.label, render(cfg.sampler), cfg.seed, run_id(cfg), "ok", ""};
      try {
        const auto outcome = run_training(cfg, out_root, force);
        if (outcome.skipped) run.status = "skipped";
      } catch (const std::exception& e) {
        run.status = "failed";
        run.error = e.what();
      }
      runs.push_back(run);
      write_text_file(out_root / "runs.csv", render_runs_csv(runs));
      if (progress) progress(run);
    }
  }
  auto summary = summarize_sweep(out_root);
  write_text_file(out_root / "summary.csv", render_summary_csv(summary));
  return summary;
}

}  // namespace flowcurl
