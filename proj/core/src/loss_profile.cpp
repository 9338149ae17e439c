#include "flowcurl/loss_profile.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "flowcurl/error.hpp"

namespace flowcurl {

LossProfile::LossProfile(std::size_t bins) : sum_(bins, 0.0), count_(bins, 0) {
  if (bins == 0) throw DomainError("loss profile needs at least one bin");
}

double LossProfile::edge(std::size_t i) const noexcept {
  return static_cast<double>(i) / static_cast<double>(bins());
}

double LossProfile::center(std::size_t i) const noexcept {
  return (static_cast<double>(i) + 0.5) / static_cast<double>(bins());
}

std::size_t LossProfile::bin_of(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("loss profile time " + std::to_string(t) + " outside [0, 1]");
  const auto idx = static_cast<std::size_t>(t * static_cast<double>(bins()));
  return std::min(idx, bins() - 1);
}

void LossProfile::record(double t, double loss) {
  const std::size_t i = bin_of(t);
  sum_[i] += loss;
  ++count_[i];
}

void LossProfile::reset() {
  std::fill(sum_.begin(), sum_.end(), 0.0);
  std::fill(count_.begin(), count_.end(), 0);
}

void LossProfile::set_bin(std::size_t i, double sum, std::size_t count) {
  sum_.at(i) = sum;
  count_.at(i) = count;
}

std::optional<double> LossProfile::mean(std::size_t i) const {
  if (count_.at(i) == 0) return std::nullopt;
  return sum_[i] / static_cast<double>(count_[i]);
}

std::size_t LossProfile::total_count() const noexcept {
  return std::accumulate(count_.begin(), count_.end(), std::size_t{0});
}

}  // namespace flowcurl
