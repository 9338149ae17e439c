#include "flowcurl/optim.hpp"

#include <algorithm>
#include <cmath>

#include "flowcurl/error.hpp"

namespace flowcurl {

double lr_at(const LrSchedule& schedule, std::uint64_t step) {
  if (schedule.warmup_steps == 0 || step + 1 >= schedule.warmup_steps) return schedule.base_lr;
  return schedule.base_lr * (static_cast<double>(step + 1) / static_cast<double>(schedule.warmup_steps));
}

void adam_step(ParamVector& params, const ParamVector& grads, AdamState& state, double lr,
               const AdamHyper& hyper) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n)
    throw ShapeError("adam: parameter, gradient and state sizes differ");
  if (!(lr > 0.0)) throw DomainError("adam: learning rate must be positive");
  if (!grads.all_finite()) throw OptimizerError("adam: non-finite gradient, step refused");

  const std::uint64_t step = state.step + 1;
  const double correct1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  const double correct2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads.values[i];
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
    const double m_hat = state.m[i] / correct1;
    const double v_hat = state.v[i] / correct2;
    params.values[i] -= lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
  }
  state.step = step;
}

EmaState make_ema(const ParamVector& initial, double decay) {
  if (!(decay >= 0.0 && decay < 1.0)) throw DomainError("ema decay must lie in [0, 1)");
  return EmaState{initial, decay};
}

void ema_update(EmaState& ema, const ParamVector& params) {
  if (ema.shadow.size() != params.size()) throw ShapeError("ema: shadow and parameter sizes differ");
  const double keep = ema.decay;
  const double take = 1.0 - ema.decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double old = ema.shadow.values[i];
    const double target = params.values[i];
    // Clamp keeps the result a convex combination despite rounding.
    const double mixed = keep * old + take * target;
    ema.shadow.values[i] = std::clamp(mixed, std::min(old, target), std::max(old, target));
  }
}

}  // namespace flowcurl
