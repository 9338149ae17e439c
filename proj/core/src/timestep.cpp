#include "flowcurl/timestep.hpp"

#include <cmath>
#include <numbers>

#include "flowcurl/descriptor.hpp"
#include "flowcurl/error.hpp"
#include "flowcurl/numeric.hpp"

namespace flowcurl {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_unit_interval(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw DomainError("timestep " + descriptor::format_real(t) + " outside [0, 1]");
}

double logit(double t) { return std::log(t) - std::log(1.0 - t); }

}  // namespace

void validate(const StaticDistribution& dist) {
  std::visit(overloaded{
                 [](const Uniform&) {},
                 [](const Mode& m) {
                   if (!(m.s > -1.0) || !std::isfinite(m.s))
                     throw DomainError("mode sampling requires s > -1, got s = " +
                                       descriptor::format_real(m.s));
                 },
                 [](const LogitNormal& ln) {
                   if (!std::isfinite(ln.mu))
                     throw DomainError("logit-normal mu must be finite");
                   if (!(ln.sigma > 0.0) || !std::isfinite(ln.sigma))
                     throw DomainError("logit-normal requires sigma > 0, got sigma = " +
                                       descriptor::format_real(ln.sigma));
                 },
             },
             dist);
}

void validate(const TimestepDistribution& dist) {
  if (const auto* c = std::get_if<Curriculum>(&dist)) {
    validate(c->phase1);
    validate(c->phase2);
  } else {
    validate(active_phase(dist, 0));
  }
}

StaticDistribution active_phase(const TimestepDistribution& dist, std::uint64_t step) {
  return std::visit(overloaded{
                        [&](const Curriculum& c) { return step < c.switch_step ? c.phase1 : c.phase2; },
                        [](const auto& d) { return StaticDistribution(d); },
                    },
                    dist);
}

int phase_index(const TimestepDistribution& dist, std::uint64_t step) {
  if (const auto* c = std::get_if<Curriculum>(&dist)) return step < c->switch_step ? 1 : 2;
  return 1;
}

TimestepDistribution to_timestep(const StaticDistribution& dist) {
  return std::visit([](const auto& d) { return TimestepDistribution(d); }, dist);
}

double sample_t(const StaticDistribution& dist, Rng& rng) {
  validate(dist);
  return std::visit(overloaded{
                        [&](const Uniform&) { return rng.uniform(); },
                        [&](const Mode& m) {
                          const double shape = m.s + 1.0;
                          for (;;) {
                            const double g1 = rng.gamma(shape);
                            const double g2 = rng.gamma(shape);
                            const double sum = g1 + g2;
                            if (sum > 0.0 && std::isfinite(sum)) return g1 / sum;
                          }
                        },
                        [&](const LogitNormal& ln) {
                          const double u = ln.mu + ln.sigma * rng.normal();
                          return 1.0 / (1.0 + std::exp(-u));
                        },
                    },
                    dist);
}

double sample_t(const TimestepDistribution& dist, Rng& rng, std::uint64_t step) {
  return sample_t(active_phase(dist, step), rng);
}

double pdf(const StaticDistribution& dist, double t) {
  validate(dist);
  check_unit_interval(t);
  return std::visit(
      overloaded{
          [](const Uniform&) { return 1.0; },
          [&](const Mode& m) {
            if (m.s == 0.0) return 1.0;
            if (t == 0.0 || t == 1.0) return m.s > 0.0 ? 0.0 : HUGE_VAL;
            const double norm = std::exp(-numeric::log_beta(m.s + 1.0, m.s + 1.0));
            return norm * std::pow(t * (1.0 - t), m.s);
          },
          [&](const LogitNormal& ln) {
            if (t == 0.0 || t == 1.0) return 0.0;
            const double z = (logit(t) - ln.mu) / ln.sigma;
            return std::exp(-0.5 * z * z) /
                   (ln.sigma * t * (1.0 - t) * std::sqrt(2.0 * std::numbers::pi));
          },
      },
      dist);
}

double pdf(const TimestepDistribution& dist, double t, std::uint64_t step) {
  return pdf(active_phase(dist, step), t);
}

namespace {

// Mode mass on [a, b] within [0, 1/2] after t = w^m, with m chosen so the t^s factor
// becomes bounded in w.
double mode_lower_mass(const Mode& mode, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double m = std::max(1.0, std::ceil(1.0 / (mode.s + 1.0)));
  const double expo = m * (mode.s + 1.0) - 1.0;
  const double at_zero = expo == 0.0 ? m * std::exp(-numeric::log_beta(mode.s + 1.0, mode.s + 1.0)) : 0.0;
  const auto integrand = [&](double w) {
    const double t = std::pow(w, m);
    if (t <= 0.0) return at_zero;
    return pdf(mode, t) * m * std::pow(w, m - 1.0);
  };
  return numeric::integrate(integrand, std::pow(a, 1.0 / m), std::pow(b, 1.0 / m), tol);
}

}  // namespace

double integrate_pdf(const StaticDistribution& dist, double lo, double hi, double tol) {
  validate(dist);
  check_unit_interval(lo);
  check_unit_interval(hi);
  if (const auto* mode = std::get_if<Mode>(&dist)) {
    const double sign = hi >= lo ? 1.0 : -1.0;
    const double a = std::min(lo, hi), b = std::max(lo, hi);
    const double lower = mode_lower_mass(*mode, a, std::min(b, 0.5), tol);
    const double upper = mode_lower_mass(*mode, 1.0 - b, 1.0 - std::max(a, 0.5), tol);
    return sign * (lower + upper);
  }
  const auto to_u = [](double t) { return std::acos(1.0 - 2.0 * t) / std::numbers::pi; };
  const auto integrand = [&](double u) {
    const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * u));
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return pdf(dist, t) * 0.5 * std::numbers::pi * std::sin(std::numbers::pi * u);
  };
  return numeric::integrate(integrand, to_u(lo), to_u(hi), tol);
}

double cdf(const StaticDistribution& dist, double t) {
  validate(dist);
  check_unit_interval(t);
  return std::visit(overloaded{
                        [&](const Uniform&) { return t; },
                        [&](const Mode& m) {
                          if (m.s == 0.0) return t;
                          const double a = m.s + 1.0;
                          if (const auto v = numeric::incomplete_beta(t, a, a)) return *v;
                          return integrate_pdf(dist, 0.0, t);
                        },
                        [&](const LogitNormal& ln) {
                          if (t == 0.0) return 0.0;
                          if (t == 1.0) return 1.0;
                          return numeric::normal_cdf((logit(t) - ln.mu) / ln.sigma);
                        },
                    },
                    dist);
}

double cdf(const TimestepDistribution& dist, double t, std::uint64_t step) {
  return cdf(active_phase(dist, step), t);
}

std::string render(const StaticDistribution& dist) {
  using descriptor::format_real;
  return std::visit(overloaded{
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const Mode& m) { return "mode(s=" + format_real(m.s) + ")"; },
                        [](const LogitNormal& ln) {
                          return "logitnormal(mu=" + format_real(ln.mu) +
                                 ",sigma=" + format_real(ln.sigma) + ")";
                        },
                    },
                    dist);
}

std::string render(const TimestepDistribution& dist) {
  if (const auto* c = std::get_if<Curriculum>(&dist)) {
    return "curriculum(p1=" + render(c->phase1) + ";p2=" + render(c->phase2) +
           ";ts=" + std::to_string(c->switch_step) + ")";
  }
  return render(active_phase(dist, 0));
}

StaticDistribution parse_static_distribution(std::string_view text) {
  const auto call = descriptor::parse_call(text, ',');
  StaticDistribution dist;
  if (call.name == "uniform") {
    descriptor::expect_keys(call, {});
    dist = Uniform{};
  } else if (call.name == "mode") {
    descriptor::expect_keys(call, {"s"});
    dist = Mode{descriptor::parse_real(call.at("s"))};
  } else if (call.name == "logitnormal") {
    descriptor::expect_keys(call, {"mu", "sigma"});
    dist = LogitNormal{descriptor::parse_real(call.at("mu")),
                       descriptor::parse_real(call.at("sigma"))};
  } else if (call.name == "curriculum") {
    throw FormatError("curriculum phases cannot themselves be curricula: '" + std::string(text) + "'");
  } else {
    throw FormatError("unknown timestep distribution '" + call.name + "'");
  }
  validate(dist);
  return dist;
}

TimestepDistribution parse_distribution(std::string_view text) {
  const auto name = descriptor::trim(text.substr(0, text.find('(')));
  if (name != "curriculum") return to_timestep(parse_static_distribution(text));
  const auto call = descriptor::parse_call(text, ';');
  descriptor::expect_keys(call, {"p1", "p2", "ts"});
  Curriculum c{parse_static_distribution(call.at("p1")), parse_static_distribution(call.at("p2")),
               descriptor::parse_uint(call.at("ts"))};
  return c;
}

}  // namespace flowcurl
