#include "flowcurl/flow_path.hpp"

#include <cmath>
#include <string>

#include "flowcurl/error.hpp"

namespace flowcurl {
namespace {

void check_pair(const SamplePair& pair) {
  if (pair.x.size() != pair.eps.size())
    throw ShapeError("sample pair dimension mismatch: x has " + std::to_string(pair.x.size()) +
                     ", eps has " + std::to_string(pair.eps.size()));
  if (pair.x.empty()) throw ShapeError("sample pair must have dimension >= 1");
}

void check_out(const SamplePair& pair, std::span<double> out) {
  check_pair(pair);
  if (out.size() != pair.x.size()) throw ShapeError("output span has wrong dimension");
}

}  // namespace

const PathSchedule& rectified_linear() {
  static const RectifiedLinear sched;
  return sched;
}

void interpolate_into(const PathSchedule& sched, const SamplePair& pair, std::span<double> out) {
  check_out(pair, out);
  const double a = sched.a(pair.t);
  const double b = sched.b(pair.t);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * pair.x[i] + b * pair.eps[i];
}

void conditional_velocity_into(const PathSchedule& sched, const SamplePair& pair,
                               std::span<double> out) {
  check_out(pair, out);
  const double da = sched.da(pair.t);
  const double db = sched.db(pair.t);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = da * pair.x[i] + db * pair.eps[i];
}

std::vector<double> interpolate(const PathSchedule& sched, const SamplePair& pair) {
  check_pair(pair);
  std::vector<double> z(pair.x.size());
  interpolate_into(sched, pair, z);
  return z;
}

std::vector<double> conditional_velocity(const PathSchedule& sched, const SamplePair& pair) {
  check_pair(pair);
  std::vector<double> v(pair.x.size());
  conditional_velocity_into(sched, pair, v);
  return v;
}

double cfm_residual(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size())
    throw ShapeError("residual dimension mismatch: " + std::to_string(prediction.size()) + " vs " +
                     std::to_string(target.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double diff = prediction[i] - target[i];
    sum += diff * diff;
  }
  return sum;
}

double adaptive_weight(double sq_err, double p, double c) {
  if (!(sq_err >= 0.0)) throw DomainError("adaptive weight needs a non-negative residual");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("adaptive weight power must lie in [0, 1]");
  if (!(c > 0.0)) throw DomainError("adaptive weight offset must be positive");
  if (p == 0.0) return 1.0;
  return std::pow(sq_err + c, -p);
}

}  // namespace flowcurl
