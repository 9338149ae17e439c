#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

#include "flowcurl/rng.hpp"

namespace flowcurl {

struct Uniform {
  friend bool operator==(const Uniform&, const Uniform&) = default;
};

/// Symmetric Beta(s+1, s+1): p(t) proportional to t^s (1-t)^s, s > -1.
struct Mode {
  double s = 0.0;
  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Law of sigmoid(u), u ~ N(mu, sigma^2).
struct LogitNormal {
  double mu = 0.0;
  double sigma = 1.0;
  friend bool operator==(const LogitNormal&, const LogitNormal&) = default;
};

/// A non-curriculum law. Curriculum phases are restricted to these, so nesting cannot be expressed.
using StaticDistribution = std::variant<Uniform, Mode, LogitNormal>;

/// phase1 for steps < switch_step, phase2 afterwards.
struct Curriculum {
  StaticDistribution phase1;
  StaticDistribution phase2;
  std::uint64_t switch_step = 0;
  friend bool operator==(const Curriculum&, const Curriculum&) = default;
};

using TimestepDistribution = std::variant<Uniform, Mode, LogitNormal, Curriculum>;

inline constexpr std::uint64_t kNeverSwitch = std::numeric_limits<std::uint64_t>::max();

/// Throws DomainError for s <= -1 or sigma <= 0 (or non-finite parameters).
void validate(const StaticDistribution& dist);
void validate(const TimestepDistribution& dist);

/// Law in force at a training step; identity for static distributions.
StaticDistribution active_phase(const TimestepDistribution& dist, std::uint64_t step);
/// 1 before the curriculum switch (and always for static laws), 2 after.
int phase_index(const TimestepDistribution& dist, std::uint64_t step);
TimestepDistribution to_timestep(const StaticDistribution& dist);

double sample_t(const StaticDistribution& dist, Rng& rng);
double sample_t(const TimestepDistribution& dist, Rng& rng, std::uint64_t step);

/// Normalized density. LogitNormal returns 0 at t in {0, 1}; Mode with s < 0 returns
/// +infinity at the endpoints, which callers must not integrate naively.
/// Throws DomainError for t outside [0, 1].
double pdf(const StaticDistribution& dist, double t);
double pdf(const TimestepDistribution& dist, double t, std::uint64_t step);

double cdf(const StaticDistribution& dist, double t);
double cdf(const TimestepDistribution& dist, double t, std::uint64_t step);

/// Mass of the density on [lo, hi] by adaptive Simpson after the substitution
/// t = (1 - cos(pi u)) / 2, which tames the integrable endpoint singularities.
double integrate_pdf(const StaticDistribution& dist, double lo, double hi, double tol = 1e-9);

std::string render(const StaticDistribution& dist);
std::string render(const TimestepDistribution& dist);

/// Grammar: `uniform`, `mode(s=<f>)`, `logitnormal(mu=<f>,sigma=<f>)`,
/// `curriculum(p1=<desc>;p2=<desc>;ts=<int>)`.
TimestepDistribution parse_distribution(std::string_view text);
StaticDistribution parse_static_distribution(std::string_view text);

}  // namespace flowcurl
