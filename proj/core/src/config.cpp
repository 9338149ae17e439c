#include "flowcurl/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "flowcurl/csv.hpp"
#include "flowcurl/descriptor.hpp"
#include "flowcurl/error.hpp"

namespace flowcurl {
namespace {

using descriptor::format_real;
using descriptor::trim;

std::vector<std::size_t> parse_widths(std::string_view text) {
  std::vector<std::size_t> widths;
  text = trim(text);
  if (text.empty() || text == "none") return widths;
  for (const auto& part : descriptor::split_top_level(text, ',')) {
    const auto w = descriptor::parse_uint(part);
    widths.push_back(static_cast<std::size_t>(w));
  }
  return widths;
}

std::string render_widths(const std::vector<std::size_t>& widths) {
  if (widths.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < widths.size(); ++i) out += (i ? "," : "") + std::to_string(widths[i]);
  return out;
}

}  // namespace

MlpConfig TrainConfig::model() const {
  return MlpConfig{dataset.dim(), hidden, time_features, activation};
}

void TrainConfig::validate() const {
  dataset.validate();
  model().validate();
  flowcurl::validate(sampler);
  if (batch_size == 0) throw DomainError("batch_size must be >= 1");
  if (total_steps == 0) throw DomainError("total_steps must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw DomainError("lr must be positive");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) throw DomainError("ema_decay must lie in [0, 1)");
  if (!(adaptive_p >= 0.0 && adaptive_p <= 1.0)) throw DomainError("adaptive_p must lie in [0, 1]");
  if (!(adaptive_c > 0.0) || !std::isfinite(adaptive_c)) throw DomainError("adaptive_c must be positive");
  if (eval_every == 0) throw DomainError("eval_every must be >= 1");
  if (nfe == 0) throw DomainError("nfe must be >= 1");
  if (profile_bins < 2) throw DomainError("profile_bins must be >= 2");
}

std::vector<IniSection> parse_ini(std::string_view text) {
  std::vector<IniSection> sections(1);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("line " + std::to_string(line_no) + ": unterminated section header");
      sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw FormatError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw FormatError("line " + std::to_string(line_no) + ": empty key");
    sections.back().entries.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  if (sections.front().entries.empty()) sections.erase(sections.begin());
  return sections;
}

void apply_config_entry(TrainConfig& cfg, const IniEntry& e) {
  using descriptor::parse_real;
  using descriptor::parse_uint;
  try {
    const std::string_view v = e.value;
    if (e.key == "dataset") cfg.dataset = parse_dataset(v);
    else if (e.key == "sampler") cfg.sampler = parse_distribution(v);
    else if (e.key == "hidden") cfg.hidden = parse_widths(v);
    else if (e.key == "time_features") cfg.time_features = parse_uint(v);
    else if (e.key == "activation") cfg.activation = parse_activation(trim(v));
    else if (e.key == "batch_size") cfg.batch_size = parse_uint(v);
    else if (e.key == "total_steps") cfg.total_steps = parse_uint(v);
    else if (e.key == "lr") cfg.lr = parse_real(v);
    else if (e.key == "warmup") cfg.warmup = parse_uint(v);
    else if (e.key == "ema_decay") cfg.ema_decay = parse_real(v);
    else if (e.key == "adaptive_p") cfg.adaptive_p = parse_real(v);
    else if (e.key == "adaptive_c") cfg.adaptive_c = parse_real(v);
    else if (e.key == "eval_every") cfg.eval_every = parse_uint(v);
    else if (e.key == "nfe") cfg.nfe = parse_uint(v);
    else if (e.key == "profile_bins") cfg.profile_bins = parse_uint(v);
    else if (e.key == "seed") cfg.seed = parse_uint(v);
    else throw FormatError("unknown key '" + e.key + "'");
  } catch (const Error& err) {
    throw FormatError("line " + std::to_string(e.line) + " (" + e.key + "): " + err.what());
  }
}

TrainConfig parse_config(std::string_view text, TrainConfig base) {
  std::set<std::string> seen;
  for (const auto& section : parse_ini(text)) {
    for (const auto& entry : section.entries) {
      if (!seen.insert(entry.key).second)
        throw FormatError("line " + std::to_string(entry.line) + ": duplicate key '" + entry.key + "'");
      apply_config_entry(base, entry);
    }
  }
  base.validate();
  return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  try {
    return parse_config(read_text_file(path), std::move(base));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string render(const TrainConfig& cfg) {
  std::string out;
  auto kv = [&](std::string_view key, const std::string& value) {
    out.append(key).append(" = ").append(value).append("\n");
  };
  out += "[data]\n";
  kv("dataset", render(cfg.dataset));
  out += "\n[model]\n";
  kv("hidden", render_widths(cfg.hidden));
  kv("time_features", std::to_string(cfg.time_features));
  kv("activation", std::string(to_string(cfg.activation)));
  out += "\n[sampler]\n";
  kv("sampler", render(cfg.sampler));
  out += "\n[optim]\n";
  kv("batch_size", std::to_string(cfg.batch_size));
  kv("total_steps", std::to_string(cfg.total_steps));
  kv("lr", format_real(cfg.lr));
  kv("warmup", std::to_string(cfg.warmup));
  kv("ema_decay", format_real(cfg.ema_decay));
  kv("adaptive_p", format_real(cfg.adaptive_p));
  kv("adaptive_c", format_real(cfg.adaptive_c));
  out += "\n[run]\n";
  kv("eval_every", std::to_string(cfg.eval_every));
  kv("nfe", std::to_string(cfg.nfe));
  kv("profile_bins", std::to_string(cfg.profile_bins));
  kv("seed", std::to_string(cfg.seed));
  return out;
}

TrainConfig apply_preset(TrainConfig base, std::string_view name) {
  if (name == "desk") return TrainConfig{};
  if (name == "paper-weighting") {
    base.adaptive_p = 0.75;
    base.adaptive_c = 1e-3;
    return base;
  }
  if (name == "paper-scale") {
    base.batch_size = 1024;
    base.lr = 6e-4;
    base.warmup = 10000;
    base.ema_decay = 0.99995;
    base.total_steps = 150000;
    base.adaptive_p = 0.75;
    base.adaptive_c = 1e-3;
    base.nfe = 50;
    return base;
  }
  throw FormatError("unknown preset '" + std::string(name) + "' (desk, paper-scale, paper-weighting)");
}

std::string run_id(const TrainConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : render(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace flowcurl
