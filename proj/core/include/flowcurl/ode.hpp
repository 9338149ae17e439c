#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "flowcurl/matrix.hpp"
#include "flowcurl/mlp.hpp"
#include "flowcurl/rng.hpp"

namespace flowcurl {

/// Explicit Euler from t = 1 (noise) to t = 0 (data) with n_steps uniform steps.
struct SolverConfig {
  std::size_t n_steps = 50;
};

/// Batched velocity field: writes v(z_r, t_r) into row r of `out` (resized by the callee
/// if needed).
using VelocityField = std::function<void(const Matrix& z, std::span<const double> t, Matrix& out)>;

/// The network as a field. `params` and `cfg` must outlive the returned callable.
VelocityField mlp_field(const ParamVector& params, const MlpConfig& cfg);

/// Integrates every row of `eps` jointly: z <- z - (1/N) v(z, 1 - k/N) for k = 0..N-1.
/// Throws SolverDivergence naming the step and row of the first non-finite value.
Matrix euler_integrate(const VelocityField& field, Matrix eps, const SolverConfig& solver);

std::vector<double> euler_generate(const VelocityField& field, std::span<const double> eps,
                                   const SolverConfig& solver);
std::vector<double> euler_generate(const ParamVector& params, const MlpConfig& cfg,
                                   std::span<const double> eps, const SolverConfig& solver);

/// n x d matrix of i.i.d. standard normals, filled row-major.
Matrix draw_noise(std::size_t n, std::size_t d, Rng& rng);

/// Draws n_samples noise rows from `rng` and integrates them with the network.
Matrix batch_generate(const ParamVector& params, const MlpConfig& cfg, std::size_t n_samples,
                      const SolverConfig& solver, Rng& rng);

}  // namespace flowcurl
