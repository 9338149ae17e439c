#include "flowcurl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "flowcurl/csv.hpp"
#include "flowcurl/config.hpp"
#include "flowcurl/error.hpp"

namespace flowcurl {
namespace {

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  Range padded() const {
    Range r = *this;
    if (r.empty()) return {0.0, 1.0};
    if (r.hi == r.lo) {
      const double pad = r.lo == 0.0 ? 1.0 : 0.05 * std::abs(r.lo);
      r.lo -= pad;
      r.hi += pad;
    }
    return r;
  }
};

struct Panel {
  double x0, y0, w, h;
  Range xr, yr;
  bool log_y = false;

  double px(double x) const { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * w; }
  double py(double y) const {
    const double lo = log_y ? std::log10(yr.lo) : yr.lo;
    const double hi = log_y ? std::log10(yr.hi) : yr.hi;
    const double v = log_y ? std::log10(y) : y;
    return y0 + h - (v - lo) / (hi - lo) * h;
  }

  void draw_axes(SvgWriter& svg, const std::string& title, const std::string& xlabel) const {
    svg.rect(x0, y0, w, h, "none", "frame");
    svg.text(x0 + w / 2, y0 - 8, title, 13, "middle");
    svg.text(x0 + w / 2, y0 + h + 34, xlabel, 11, "middle");
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
      const double f = static_cast<double>(i) / kTicks;
      const double xv = xr.lo + f * (xr.hi - xr.lo);
      const double x = px(xv);
      svg.line(x, y0 + h, x, y0 + h + 4, "#333");
      svg.text(x, y0 + h + 16, fmt(xv), 10, "middle");
      double yv;
      if (log_y) {
        yv = std::pow(10.0, std::log10(yr.lo) + f * (std::log10(yr.hi) - std::log10(yr.lo)));
      } else {
        yv = yr.lo + f * (yr.hi - yr.lo);
      }
      const double y = py(yv);
      svg.line(x0 - 4, y, x0, y, "#333");
      svg.text(x0 - 6, y + 3, fmt(yv, "%.3g"), 10, "end");
    }
  }
};

// Sequential ramp from pale yellow to dark blue.
std::string ramp(double f) {
  f = std::clamp(f, 0.0, 1.0);
  const double a[3] = {255, 237, 160};
  const double b[3] = {8, 29, 88};
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(a[0] + f * (b[0] - a[0]))),
                static_cast<int>(std::lround(a[1] + f * (b[1] - a[1]))),
                static_cast<int>(std::lround(a[2] + f * (b[2] - a[2]))));
  return buf;
}

void write_svg(const std::filesystem::path& path, const std::string& svg) { write_text_file(path, svg); }

}  // namespace

SvgWriter::SvgWriter(double width, double height) : width_(width), height_(height) {}

void SvgWriter::line(double x1, double y1, double x2, double y2, const std::string& stroke, double width) {
  body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" + fmt(y2) +
           "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) + "\"/>\n";
}

void SvgWriter::polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width) {
  std::string points;
  for (const auto& [x, y] : pts) points += (points.empty() ? "" : " ") + fmt(x, "%.2f") + "," + fmt(y, "%.2f");
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) + "\" points=\"" +
           points + "\"/>\n";
}

void SvgWriter::rect(double x, double y, double w, double h, const std::string& fill, const std::string& klass) {
  body_ += "<rect";
  if (!klass.empty()) body_ += " class=\"" + klass + "\"";
  body_ += " x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
           "\" fill=\"" + fill + "\"" + (fill == "none" ? " stroke=\"#333\"" : "") + "/>\n";
}

void SvgWriter::text(double x, double y, const std::string& s, double size, const std::string& anchor) {
  body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" + fmt(size) + "\" text-anchor=\"" +
           anchor + "\" font-family=\"sans-serif\">" + escape_xml(s) + "</text>\n";
}

void SvgWriter::group_begin(const std::string& klass) { body_ += "<g class=\"" + klass + "\">\n"; }
void SvgWriter::group_end() { body_ += "</g>\n"; }

std::string SvgWriter::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) + "\" height=\"" + fmt(height_) +
         "\" viewBox=\"0 0 " + fmt(width_) + " " + fmt(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

std::string metrics_svg(const RunLog& log) {
  const auto rows = log.eval_rows();
  if (rows.empty()) throw InputError("run log has no evaluated rows to plot");
  struct Series {
    const char* name;
    double EvalMetrics::*field;
    const char* color;
  };
  const Series series[] = {{"sw2", &EvalMetrics::sw2, "#1f77b4"},
                           {"energy_dist", &EvalMetrics::energy, "#d62728"},
                           {"mmd", &EvalMetrics::mmd, "#2ca02c"}};
  Range xr, yr;
  for (const auto& r : rows) {
    xr.add(static_cast<double>(r.step));
    for (const auto& s : series) {
      const double v = r.metrics.value().*s.field;
      if (v > 0.0) yr.add(v);
    }
  }
  SvgWriter svg(720, 440);
  Panel panel{70, 40, 520, 340, xr.padded(), yr.padded(), !yr.empty() && yr.lo > 0.0};
  panel.draw_axes(svg, "evaluation metrics", "step");
  for (std::size_t k = 0; k < std::size(series); ++k) {
    const auto& s = series[k];
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
      const double v = r.metrics.value().*s.field;
      if (std::isfinite(v) && v > 0.0) pts.emplace_back(panel.px(static_cast<double>(r.step)), panel.py(v));
    }
    svg.group_begin(std::string("series ") + s.name);
    svg.polyline(pts, s.color);
    svg.group_end();
    svg.line(610, 60 + 18.0 * k, 630, 60 + 18.0 * k, s.color, 2.0);
    svg.text(636, 64 + 18.0 * k, s.name);
  }
  return svg.str();
}

std::string loss_profile_svg(const std::vector<ProfileSnapshot>& snapshots) {
  Range yr, steps;
  for (const auto& snap : snapshots) {
    for (std::size_t i = 0; i < snap.profile.bins(); ++i)
      if (const auto m = snap.profile.mean(i)) yr.add(*m);
    steps.add(static_cast<double>(snap.eval_step));
  }
  if (yr.empty()) throw InputError("loss profile is empty");
  SvgWriter svg(720, 440);
  Panel panel{70, 40, 520, 340, Range{0.0, 1.0}, yr.padded()};
  panel.draw_axes(svg, "loss by time", "t");
  for (const auto& snap : snapshots) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < snap.profile.bins(); ++i)
      if (const auto m = snap.profile.mean(i); m && std::isfinite(*m))
        pts.emplace_back(panel.px(snap.profile.center(i)), panel.py(*m));
    if (pts.empty()) continue;
    const double f = steps.hi > steps.lo ? (static_cast<double>(snap.eval_step) - steps.lo) / (steps.hi - steps.lo) : 1.0;
    svg.group_begin("profile step-" + std::to_string(snap.eval_step));
    svg.polyline(pts, ramp(0.15 + 0.85 * f));
    svg.group_end();
  }
  svg.text(610, 60, "step " + fmt(steps.lo, "%.0f"), 10);
  svg.rect(610, 66, 20, 10, ramp(0.15));
  svg.text(610, 96, "step " + fmt(steps.hi, "%.0f"), 10);
  svg.rect(610, 102, 20, 10, ramp(1.0));
  return svg.str();
}

std::string density_svg(const std::array<LossProfile, 2>& phases, const TimestepDistribution& sampler,
                        std::uint64_t total_steps) {
  std::vector<std::size_t> used;
  for (std::size_t p = 0; p < phases.size(); ++p)
    if (phases[p].total_count() > 0) used.push_back(p);
  if (used.empty()) throw InputError("no sampled times to plot");
  const double panel_w = 420;
  SvgWriter svg(80 + 480.0 * static_cast<double>(used.size()), 440);
  for (std::size_t k = 0; k < used.size(); ++k) {
    const std::size_t p = used[k];
    const auto& prof = phases[p];
    const double total = static_cast<double>(prof.total_count());
    const double width = 1.0 / static_cast<double>(prof.bins());
    const StaticDistribution law = p == 0 ? active_phase(sampler, 0) : active_phase(sampler, total_steps + 1);
    constexpr int kCurve = 200;
    std::vector<std::pair<double, double>> curve;
    Range yr;
    yr.add(0.0);
    for (std::size_t i = 0; i < prof.bins(); ++i) yr.add(static_cast<double>(prof.count(i)) / (total * width));
    for (int i = 0; i <= kCurve; ++i) {
      const double t = (i + 0.5) / (kCurve + 1.0);
      const double v = pdf(law, t);
      curve.emplace_back(t, v);
      if (std::isfinite(v)) yr.add(std::min(v, 2.0 * yr.hi));
    }
    Panel panel{70 + 480.0 * static_cast<double>(k), 40, panel_w, 340, Range{0.0, 1.0}, yr.padded()};
    svg.group_begin("panel phase-" + std::to_string(p + 1));
    panel.draw_axes(svg, "phase " + std::to_string(p + 1) + ": " + render(law), "t");
    for (std::size_t i = 0; i < prof.bins(); ++i) {
      const double dens = static_cast<double>(prof.count(i)) / (total * width);
      const double top = panel.py(std::min(dens, panel.yr.hi));
      svg.rect(panel.px(prof.edge(i)), top, panel.px(prof.edge(i + 1)) - panel.px(prof.edge(i)),
               panel.y0 + panel.h - top, "#9ecae1");
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, v] : curve)
      if (std::isfinite(v) && v <= panel.yr.hi) pts.emplace_back(panel.px(t), panel.py(v));
    svg.polyline(pts, "#08306b");
    svg.group_end();
  }
  return svg.str();
}

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& run_dir) {
  if (!std::filesystem::is_directory(run_dir)) throw IoError(run_dir.string(), "not a run directory");
  const TrainConfig cfg = load_config(run_dir / "config.ini");
  const RunLog log = RunLog::load(run_dir / "run_log.csv");
  const auto profiles = parse_profile_csv(read_text_file(run_dir / "loss_profile.csv"));
  const auto phases = parse_phase_profile_csv(read_text_file(run_dir / "phase_profile.csv"));

  const std::string metrics = metrics_svg(log);
  const std::string profile = loss_profile_svg(profiles);
  const std::string density = density_svg(phases, cfg.sampler, cfg.total_steps);
  std::vector<std::filesystem::path> written{run_dir / "metrics.svg", run_dir / "loss_profile.svg",
                                             run_dir / "density.svg"};
  write_svg(written[0], metrics);
  write_svg(written[1], profile);
  write_svg(written[2], density);
  return written;
}

}  // namespace flowcurl
