#pragma once

#include <functional>
#include <optional>

namespace flowcurl::numeric {

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-9,
                 int max_depth = 50);

double log_beta(double a, double b);

/// Standard normal CDF.
double normal_cdf(double x);

/// Regularized incomplete beta I_x(a, b) by the Lentz continued fraction.
/// Returns nullopt when the fraction fails to reach rel_tol in max_iter terms.
std::optional<double> incomplete_beta(double x, double a, double b, double rel_tol = 1e-12,
                                      int max_iter = 300);

}  // namespace flowcurl::numeric
