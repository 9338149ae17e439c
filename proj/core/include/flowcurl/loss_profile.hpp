#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace flowcurl {

/// Running per-bin loss sums over a uniform partition of [0, 1]. Bin means estimate
/// E[loss | t in bin]; the sampling density only shows up in the counts.
class LossProfile {
 public:
  explicit LossProfile(std::size_t bins = 64);

  std::size_t bins() const noexcept { return sum_.size(); }
  /// i / bins, for i in [0, bins].
  double edge(std::size_t i) const noexcept;
  double center(std::size_t i) const noexcept;
  /// Index of the bin containing t; t = 1 falls in the last bin. Throws DomainError outside [0, 1].
  std::size_t bin_of(double t) const;

  void record(double t, double loss);
  void reset();
  /// Overwrites one bin; used when restoring a profile from disk.
  void set_bin(std::size_t i, double sum, std::size_t count);

  double sum(std::size_t i) const { return sum_.at(i); }
  std::size_t count(std::size_t i) const { return count_.at(i); }
  std::optional<double> mean(std::size_t i) const;
  std::size_t total_count() const noexcept;

  friend bool operator==(const LossProfile&, const LossProfile&) = default;

 private:
  std::vector<double> sum_;
  std::vector<std::size_t> count_;
};

inline void record_loss(LossProfile& profile, double t, double loss) { profile.record(t, loss); }

}  // namespace flowcurl
