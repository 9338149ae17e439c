#pragma once

#include <cstdint>
#include <vector>

#include "flowcurl/mlp.hpp"

namespace flowcurl {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates and the number of steps taken.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct EmaState {
  ParamVector shadow;
  double decay = 0.999;
  friend bool operator==(const EmaState&, const EmaState&) = default;
};

struct LrSchedule {
  double base_lr = 1e-3;
  std::uint64_t warmup_steps = 0;
};

/// Linear warmup: base_lr * min(1, (step + 1) / warmup_steps).
double lr_at(const LrSchedule& schedule, std::uint64_t step);

/// One bias-corrected Adam update in place. Non-finite gradients throw OptimizerError
/// and leave both params and state untouched.
void adam_step(ParamVector& params, const ParamVector& grads, AdamState& state, double lr,
               const AdamHyper& hyper = {});

/// decay must lie in [0, 1).
EmaState make_ema(const ParamVector& initial, double decay);

/// shadow <- decay * shadow + (1 - decay) * params.
void ema_update(EmaState& ema, const ParamVector& params);

}  // namespace flowcurl
