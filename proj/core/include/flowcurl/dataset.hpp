#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flowcurl/matrix.hpp"
#include "flowcurl/rng.hpp"

namespace flowcurl {

/// k isotropic Gaussians with means at angles 2 pi j / k on a circle.
struct GaussianMixture {
  std::size_t k = 8;
  double radius = 4.0;
  double sigma = 0.3;
  friend bool operator==(const GaussianMixture&, const GaussianMixture&) = default;
};

struct TwoMoons {
  double noise = 0.1;
  friend bool operator==(const TwoMoons&, const TwoMoons&) = default;
};

/// Uniform over the cells (i + j even) of a cells x cells grid on [-1, 1]^2.
struct Checkerboard {
  std::size_t cells = 4;
  friend bool operator==(const Checkerboard&, const Checkerboard&) = default;
};

/// Every row equals x0. Not standardized; used for closed-form oracles.
struct SinglePoint {
  std::vector<double> x0;
  friend bool operator==(const SinglePoint&, const SinglePoint&) = default;
};

struct DatasetSpec {
  std::variant<GaussianMixture, TwoMoons, Checkerboard, SinglePoint> shape = GaussianMixture{};
  /// Rows in the training cache; training draws from it with replacement.
  std::size_t n_cache = 65536;

  std::size_t dim() const;
  void validate() const;
  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

/// Population mean and standard deviation per coordinate of the raw generator.
struct Moments {
  std::vector<double> mean;
  std::vector<double> stddev;
};

Moments population_moments(const DatasetSpec& spec);

/// n_cache rows, standardized with the population moments, so every stream draws from
/// the same zero-mean, unit-variance law.
SampleSet generate_dataset(const DatasetSpec& spec, Rng& rng);
SampleSet generate_dataset(const DatasetSpec& spec, Rng& rng, std::size_t n);

/// `gmm(k=8,radius=4,sigma=0.3,n=65536)`, `moons(noise=0.1,n=...)`,
/// `checkerboard(cells=4,n=...)`, `point(x=0.5:-1,n=...)`. `n` is optional.
std::string render(const DatasetSpec& spec);
DatasetSpec parse_dataset(std::string_view text);

}  // namespace flowcurl
