#include "flowcurl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowcurl/error.hpp"

namespace flowcurl {
namespace {

void check_pair(const SampleSet& a, const SampleSet& b) {
  if (a.cols() != b.cols())
    throw ShapeError("sample sets differ in dimension: " + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.cols()));
  if (a.cols() == 0) throw ShapeError("sample sets must have dimension >= 1");
  if (a.rows() < 2 || b.rows() < 2) throw InputError("sample sets need at least 2 rows");
  if (!a.all_finite() || !b.all_finite()) throw InputError("sample sets contain non-finite values");
}

double distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return s;
}

// Sum of f(|x_i - x_j|) over all ordered pairs of one set (diagonal contributes f(0)).
template <class F>
double within_sum(const SampleSet& a, F&& f) {
  double off = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.rows(); ++j) off += f(a.row(i), a.row(j));
  return 2.0 * off;
}

template <class F>
double cross_sum(const SampleSet& a, const SampleSet& b, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) s += f(a.row(i), b.row(j));
  return s;
}

}  // namespace

double w2_squared_sorted(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 || m == 0) throw InputError("w2 needs non-empty inputs");
  // Quantile levels are tracked as integers over the common denominator n * m.
  const double denom = static_cast<double>(n) * static_cast<double>(m);
  std::size_t i = 0;
  std::size_t j = 0;
  std::uint64_t level = 0;
  double total = 0.0;
  while (i < n && j < m) {
    const std::uint64_t next_a = static_cast<std::uint64_t>(i + 1) * m;
    const std::uint64_t next_b = static_cast<std::uint64_t>(j + 1) * n;
    const std::uint64_t next = std::min(next_a, next_b);
    const double diff = a[i] - b[j];
    total += static_cast<double>(next - level) * diff * diff;
    level = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return total / denom;
}

double sliced_w2(const SampleSet& a, const SampleSet& b, std::size_t n_proj, Rng& rng) {
  check_pair(a, b);
  if (n_proj == 0) throw DomainError("sliced_w2 needs at least one projection");
  const std::size_t d = a.cols();
  std::vector<double> dir(d);
  std::vector<double> pa(a.rows());
  std::vector<double> pb(b.rows());
  double total = 0.0;
  for (std::size_t p = 0; p < n_proj; ++p) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : dir) {
        v = rng.normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& v : dir) v /= norm;
    auto project = [&](const SampleSet& s, std::vector<double>& out) {
      for (std::size_t i = 0; i < s.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += s(i, k) * dir[k];
        out[i] = acc;
      }
      std::sort(out.begin(), out.end());
    };
    project(a, pa);
    project(b, pb);
    total += w2_squared_sorted(pa, pb);
  }
  return std::sqrt(total / static_cast<double>(n_proj));
}

double energy_distance(const SampleSet& a, const SampleSet& b) {
  check_pair(a, b);
  const double n = static_cast<double>(a.rows());
  const double m = static_cast<double>(b.rows());
  const double ab = cross_sum(a, b, distance) / (n * m);
  const double aa = within_sum(a, distance) / (n * n);
  const double bb = within_sum(b, distance) / (m * m);
  return std::max(0.0, 2.0 * ab - aa - bb);
}

double median_pairwise_distance(const SampleSet& a, const SampleSet& b) {
  check_pair(a, b);
  std::vector<std::span<const double>> rows;
  rows.reserve(a.rows() + b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) rows.push_back(a.row(i));
  for (std::size_t i = 0; i < b.rows(); ++i) rows.push_back(b.row(i));
  std::vector<double> dists;
  dists.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) dists.push_back(distance(rows[i], rows[j]));
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  const double upper = dists[mid];
  if (dists.size() % 2 == 1) return upper;
  const double lower = *std::max_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mmd_rbf(const SampleSet& a, const SampleSet& b, Bandwidth bandwidth) {
  check_pair(a, b);
  double sigma = 0.0;
  if (bandwidth.sigma) {
    sigma = *bandwidth.sigma;
    if (!(sigma > 0.0)) throw DomainError("mmd bandwidth must be positive");
  } else {
    sigma = median_pairwise_distance(a, b);
    if (sigma == 0.0) return 0.0;  // more than half the pooled pairs coincide exactly
  }
  if (std::isinf(sigma)) return 0.0;
  const double scale = -1.0 / (2.0 * sigma * sigma);
  auto kernel = [scale](std::span<const double> x, std::span<const double> y) {
    return std::exp(scale * squared_distance(x, y));
  };
  const double n = static_cast<double>(a.rows());
  const double m = static_cast<double>(b.rows());
  const double kaa = (within_sum(a, kernel) + n) / (n * n);
  const double kbb = (within_sum(b, kernel) + m) / (m * m);
  const double kab = cross_sum(a, b, kernel) / (n * m);
  return std::max(0.0, kaa + kbb - 2.0 * kab);
}

double u_shape_ratio(std::span<const ProfilePoint> profile) {
  if (profile.size() < 11) throw InsufficientData("u-shape ratio needs at least 11 grid points");
  double edge_sum = 0.0;
  double mid_sum = 0.0;
  std::size_t edge_n = 0;
  std::size_t mid_n = 0;
  for (const auto& p : profile) {
    const bool edge = p.t <= 0.1 || p.t >= 0.9;
    const bool mid = p.t >= 0.4 && p.t <= 0.6;
    if (!edge && !mid) continue;
    if (p.count == 0 || !std::isfinite(p.loss))
      throw InsufficientData("loss profile point at t = " + std::to_string(p.t) + " is unpopulated");
    if (edge) {
      edge_sum += p.loss;
      ++edge_n;
    } else {
      mid_sum += p.loss;
      ++mid_n;
    }
  }
  if (edge_n == 0 || mid_n == 0) throw InsufficientData("loss profile does not cover the boundary and middle windows");
  const double mid_mean = mid_sum / static_cast<double>(mid_n);
  if (!(mid_mean > 0.0)) throw DomainError("middle-window loss is zero; ratio undefined");
  return (edge_sum / static_cast<double>(edge_n)) / mid_mean;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InputError("ks statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace flowcurl
