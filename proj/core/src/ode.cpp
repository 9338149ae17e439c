#include "flowcurl/ode.hpp"

#include <cmath>

#include "flowcurl/error.hpp"

namespace flowcurl {

VelocityField mlp_field(const ParamVector& params, const MlpConfig& cfg) {
  return [&params, &cfg](const Matrix& z, std::span<const double> t, Matrix& out) {
    predict(params, cfg, z, t, out);
  };
}

Matrix euler_integrate(const VelocityField& field, Matrix z, const SolverConfig& solver) {
  if (solver.n_steps == 0) throw DomainError("euler solver needs n_steps >= 1");
  for (std::size_t r = 0; r < z.rows(); ++r)
    for (double v : z.row(r))
      if (!std::isfinite(v)) throw InputError("non-finite initial noise in row " + std::to_string(r));
  const std::size_t n = solver.n_steps;
  const double dt = 1.0 / static_cast<double>(n);
  std::vector<double> times(z.rows());
  Matrix velocity(z.rows(), z.cols());
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 1.0 - static_cast<double>(k) / static_cast<double>(n);
    std::fill(times.begin(), times.end(), t);
    field(z, times, velocity);
    if (velocity.rows() != z.rows() || velocity.cols() != z.cols())
      throw ShapeError("velocity field returned the wrong shape");
    for (std::size_t r = 0; r < z.rows(); ++r) {
      auto zr = z.row(r);
      const auto vr = velocity.row(r);
      bool finite = true;
      for (std::size_t j = 0; j < zr.size(); ++j) {
        zr[j] -= dt * vr[j];
        finite = finite && std::isfinite(zr[j]);
      }
      if (!finite) throw SolverDivergence(k, r);
    }
  }
  return z;
}

std::vector<double> euler_generate(const VelocityField& field, std::span<const double> eps,
                                   const SolverConfig& solver) {
  Matrix z(1, eps.size(), std::vector<double>(eps.begin(), eps.end()));
  const Matrix out = euler_integrate(field, std::move(z), solver);
  return std::vector<double>(out.values().begin(), out.values().end());
}

std::vector<double> euler_generate(const ParamVector& params, const MlpConfig& cfg,
                                   std::span<const double> eps, const SolverConfig& solver) {
  return euler_generate(mlp_field(params, cfg), eps, solver);
}

Matrix draw_noise(std::size_t n, std::size_t d, Rng& rng) {
  Matrix eps(n, d);
  for (auto& v : eps.values()) v = rng.normal();
  return eps;
}

Matrix batch_generate(const ParamVector& params, const MlpConfig& cfg, std::size_t n_samples,
                      const SolverConfig& solver, Rng& rng) {
  if (n_samples == 0) throw DomainError("batch_generate needs n_samples >= 1");
  return euler_integrate(mlp_field(params, cfg), draw_noise(n_samples, cfg.in_dim, rng), solver);
}

}  // namespace flowcurl
