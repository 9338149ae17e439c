#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "flowcurl/loss_profile.hpp"
#include "flowcurl/timestep.hpp"
#include "flowcurl/trainer.hpp"

namespace flowcurl {

/// Minimal SVG document builder. Coordinates are in user units, y pointing down.
class SvgWriter {
 public:
  SvgWriter(double width, double height);

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width = 1.5);
  void rect(double x, double y, double w, double h, const std::string& fill, const std::string& klass = "");
  void text(double x, double y, const std::string& s, double size = 11.0, const std::string& anchor = "start");
  void group_begin(const std::string& klass);
  void group_end();

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

/// sw2, energy distance and MMD against step, one line each. Throws InputError when the log
/// has no evaluated rows.
std::string metrics_svg(const RunLog& log);
/// One curve per snapshot, light to dark with eval step. Throws InputError when every bin
/// of every snapshot is empty.
std::string loss_profile_svg(const std::vector<ProfileSnapshot>& snapshots);
/// Histogram of sampled times for each phase that saw samples, one panel per phase, with the
/// analytic density of that phase overlaid.
std::string density_svg(const std::array<LossProfile, 2>& phases, const TimestepDistribution& sampler,
                        std::uint64_t total_steps);

/// Reads a run directory and writes metrics.svg, loss_profile.svg and density.svg next to the
/// CSVs. Returns the written paths.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& run_dir);

}  // namespace flowcurl
