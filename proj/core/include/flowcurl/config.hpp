#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "flowcurl/dataset.hpp"
#include "flowcurl/mlp.hpp"
#include "flowcurl/timestep.hpp"

namespace flowcurl {

/// Everything that determines a training run. Defaults are the desk-scale recipe.
struct TrainConfig {
  DatasetSpec dataset;
  std::vector<std::size_t> hidden{256, 256, 256};
  std::size_t time_features = 8;
  Activation activation = Activation::kSiLU;
  TimestepDistribution sampler = Uniform{};
  std::size_t batch_size = 256;
  std::uint64_t total_steps = 20000;
  double lr = 1e-3;
  std::uint64_t warmup = 500;
  double ema_decay = 0.999;
  double adaptive_p = 0.0;  // 0 disables adaptive weighting
  double adaptive_c = 1e-3;
  std::uint64_t eval_every = 1000;
  std::size_t nfe = 50;
  std::size_t profile_bins = 64;
  std::uint64_t seed = 0;

  MlpConfig model() const;
  bool adaptive_weighting() const noexcept { return adaptive_p != 0.0; }
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct IniEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct IniSection {
  std::string name;  // empty for entries before the first header
  std::vector<IniEntry> entries;
};

/// `[section]` headers, `key = value` lines, `#` comment lines. Values keep everything after
/// the first '=' (trimmed), so descriptors containing '=' are fine.
std::vector<IniSection> parse_ini(std::string_view text);

/// Sets one config key; throws FormatError naming the line for unknown keys or bad values.
void apply_config_entry(TrainConfig& cfg, const IniEntry& entry);

/// Section names are cosmetic; keys are global and may appear at most once.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
std::string render(const TrainConfig& cfg);

/// Named presets: `desk` (defaults), `paper-scale` (the full-size recipe: batch 1024,
/// lr 6e-4, 10k warmup, EMA 0.99995, 150k steps, adaptive p 0.75), and `paper-weighting`
/// (adaptive p = 0.75, c = 1e-3 on top of `base`).
TrainConfig apply_preset(TrainConfig base, std::string_view name);

/// 16 hex digits of FNV-1a over the rendered config (which includes the seed).
std::string run_id(const TrainConfig& cfg);

}  // namespace flowcurl
