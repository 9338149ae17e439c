#pragma once

#include <span>
#include <vector>

namespace flowcurl {

/// Coefficients of z_t = a(t) x + b(t) eps and their time derivatives.
class PathSchedule {
 public:
  virtual ~PathSchedule() = default;
  virtual double a(double t) const = 0;
  virtual double b(double t) const = 0;
  virtual double da(double t) const = 0;
  virtual double db(double t) const = 0;
};

/// a = 1 - t, b = t: straight paths with velocity eps - x.
class RectifiedLinear final : public PathSchedule {
 public:
  double a(double t) const override { return 1.0 - t; }
  double b(double t) const override { return t; }
  double da(double) const override { return -1.0; }
  double db(double) const override { return 1.0; }
};

const PathSchedule& rectified_linear();

/// Data point, prior noise, and time of one training example.
struct SamplePair {
  std::span<const double> x;
  std::span<const double> eps;
  double t = 0.0;
};

std::vector<double> interpolate(const PathSchedule& sched, const SamplePair& pair);
std::vector<double> conditional_velocity(const PathSchedule& sched, const SamplePair& pair);

// In-place forms for the training loop; `out` must have the pair's dimension.
void interpolate_into(const PathSchedule& sched, const SamplePair& pair, std::span<double> out);
void conditional_velocity_into(const PathSchedule& sched, const SamplePair& pair,
                               std::span<double> out);

/// Squared Euclidean distance, summed (not averaged) over coordinates.
double cfm_residual(std::span<const double> prediction, std::span<const double> target);

/// (sq_err + c)^(-p). Used as a constant factor: no gradient flows through it.
double adaptive_weight(double sq_err, double p, double c);

}  // namespace flowcurl
