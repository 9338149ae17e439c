#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "flowcurl/matrix.hpp"
#include "flowcurl/rng.hpp"

namespace flowcurl {

/// Squared 1-D Wasserstein-2 between two empirical laws via the monotone (quantile)
/// coupling. Inputs must be sorted ascending; sizes may differ.
double w2_squared_sorted(std::span<const double> a, std::span<const double> b);

/// Root of the mean, over n_proj random unit directions, of the squared 1-D W2 between
/// the projected sets. Both sets share the same directions.
double sliced_w2(const SampleSet& a, const SampleSet& b, std::size_t n_proj, Rng& rng);

/// V-statistic 2 E|a-b| - E|a-a'| - E|b-b'| over all pairs, clamped at zero.
double energy_distance(const SampleSet& a, const SampleSet& b);

/// RBF kernel bandwidth: fixed sigma, or the median pairwise distance of A u B when empty.
struct Bandwidth {
  std::optional<double> sigma;
  static Bandwidth median() { return {}; }
  static Bandwidth fixed(double s) { return {s}; }
};

/// Median of the pairwise distances among the rows of A u B (pairs i < j).
double median_pairwise_distance(const SampleSet& a, const SampleSet& b);

/// Biased (V-statistic) MMD^2 with kernel exp(-|a-b|^2 / (2 sigma^2)), clamped at zero.
double mmd_rbf(const SampleSet& a, const SampleSet& b, Bandwidth bandwidth = Bandwidth::median());

/// One row of an offline loss profile.
struct ProfilePoint {
  double t = 0.0;
  double loss = 0.0;
  std::size_t count = 0;
};

/// mean loss over t in [0, 0.1] u [0.9, 1] divided by mean loss over t in [0.4, 0.6].
/// Throws InsufficientData when fewer than 11 points are given or a window is empty
/// or has an unpopulated point.
double u_shape_ratio(std::span<const ProfilePoint> profile);

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace flowcurl
