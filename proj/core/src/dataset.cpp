#include "flowcurl/dataset.hpp"

#include <cmath>
#include <numbers>

#include "flowcurl/descriptor.hpp"
#include "flowcurl/error.hpp"

namespace flowcurl {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using std::numbers::pi;

struct CellCenter {
  double x, y;
};

std::vector<CellCenter> black_cells(std::size_t cells) {
  std::vector<CellCenter> out;
  const double h = 2.0 / static_cast<double>(cells);
  for (std::size_t i = 0; i < cells; ++i)
    for (std::size_t j = 0; j < cells; ++j)
      if ((i + j) % 2 == 0) out.push_back({-1.0 + h * (i + 0.5), -1.0 + h * (j + 0.5)});
  return out;
}

void draw_raw(const DatasetSpec& spec, const std::vector<CellCenter>& centers, Rng& rng,
              std::span<double> row) {
  std::visit(overloaded{
                 [&](const GaussianMixture& g) {
                   const double angle = 2.0 * pi * static_cast<double>(rng.below(g.k)) / static_cast<double>(g.k);
                   row[0] = g.radius * std::cos(angle) + g.sigma * rng.normal();
                   row[1] = g.radius * std::sin(angle) + g.sigma * rng.normal();
                 },
                 [&](const TwoMoons& m) {
                   const bool upper = rng.below(2) == 0;
                   const double theta = pi * rng.uniform();
                   if (upper) {
                     row[0] = std::cos(theta);
                     row[1] = std::sin(theta);
                   } else {
                     row[0] = 1.0 - std::cos(theta);
                     row[1] = 0.5 - std::sin(theta);
                   }
                   row[0] += m.noise * rng.normal();
                   row[1] += m.noise * rng.normal();
                 },
                 [&](const Checkerboard& c) {
                   const double h = 2.0 / static_cast<double>(c.cells);
                   const auto& cell = centers[rng.below(centers.size())];
                   row[0] = cell.x + h * (rng.uniform() - 0.5);
                   row[1] = cell.y + h * (rng.uniform() - 0.5);
                 },
                 [&](const SinglePoint& p) { std::copy(p.x0.begin(), p.x0.end(), row.begin()); },
             },
             spec.shape);
}

}  // namespace

std::size_t DatasetSpec::dim() const {
  if (const auto* p = std::get_if<SinglePoint>(&shape)) return p->x0.size();
  return 2;
}

void DatasetSpec::validate() const {
  if (n_cache == 0) throw DomainError("dataset cache size must be positive");
  std::visit(overloaded{
                 [](const GaussianMixture& g) {
                   if (g.k == 0) throw DomainError("gmm needs k >= 1");
                   if (!(g.radius >= 0.0) || !std::isfinite(g.radius)) throw DomainError("gmm radius must be >= 0");
                   if (!(g.sigma > 0.0) || !std::isfinite(g.sigma)) throw DomainError("gmm sigma must be > 0");
                 },
                 [](const TwoMoons& m) {
                   if (!(m.noise >= 0.0) || !std::isfinite(m.noise)) throw DomainError("moons noise must be >= 0");
                 },
                 [](const Checkerboard& c) {
                   if (c.cells == 0) throw DomainError("checkerboard needs cells >= 1");
                 },
                 [](const SinglePoint& p) {
                   if (p.x0.empty()) throw DomainError("point dataset needs at least one coordinate");
                   for (double v : p.x0)
                     if (!std::isfinite(v)) throw DomainError("point coordinates must be finite");
                 },
             },
             shape);
}

Moments population_moments(const DatasetSpec& spec) {
  spec.validate();
  return std::visit(
      overloaded{
          [](const GaussianMixture& g) {
            double mx = 0, my = 0, sxx = 0, syy = 0;
            for (std::size_t j = 0; j < g.k; ++j) {
              const double a = 2.0 * pi * static_cast<double>(j) / static_cast<double>(g.k);
              const double cx = g.radius * std::cos(a);
              const double cy = g.radius * std::sin(a);
              mx += cx;
              my += cy;
              sxx += cx * cx;
              syy += cy * cy;
            }
            const double k = static_cast<double>(g.k);
            mx /= k;
            my /= k;
            const double vx = std::max(0.0, sxx / k - mx * mx) + g.sigma * g.sigma;
            const double vy = std::max(0.0, syy / k - my * my) + g.sigma * g.sigma;
            return Moments{{mx, my}, {std::sqrt(vx), std::sqrt(vy)}};
          },
          [](const TwoMoons& m) {
            const double n2 = m.noise * m.noise;
            const double vx = 0.75 + n2;
            const double vy = 0.5 * (1.25 - 2.0 / pi) - 0.0625 + n2;
            return Moments{{0.5, 0.25}, {std::sqrt(vx), std::sqrt(vy)}};
          },
          [](const Checkerboard& c) {
            const auto cells = black_cells(c.cells);
            const double h = 2.0 / static_cast<double>(c.cells);
            double mx = 0, my = 0, sxx = 0, syy = 0;
            for (const auto& cell : cells) {
              mx += cell.x;
              my += cell.y;
              sxx += cell.x * cell.x;
              syy += cell.y * cell.y;
            }
            const double n = static_cast<double>(cells.size());
            mx /= n;
            my /= n;
            const double within = h * h / 12.0;
            return Moments{{mx, my},
                           {std::sqrt(sxx / n - mx * mx + within), std::sqrt(syy / n - my * my + within)}};
          },
          [](const SinglePoint& p) {
            return Moments{std::vector<double>(p.x0.size(), 0.0), std::vector<double>(p.x0.size(), 1.0)};
          },
      },
      spec.shape);
}

SampleSet generate_dataset(const DatasetSpec& spec, Rng& rng, std::size_t n) {
  const Moments moments = population_moments(spec);
  const std::size_t d = spec.dim();
  std::vector<CellCenter> centers;
  if (const auto* c = std::get_if<Checkerboard>(&spec.shape)) centers = black_cells(c->cells);
  SampleSet out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    draw_raw(spec, centers, rng, row);
    for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - moments.mean[j]) / moments.stddev[j];
  }
  return out;
}

SampleSet generate_dataset(const DatasetSpec& spec, Rng& rng) { return generate_dataset(spec, rng, spec.n_cache); }

std::string render(const DatasetSpec& spec) {
  using descriptor::format_real;
  const std::string n = "n=" + std::to_string(spec.n_cache);
  return std::visit(overloaded{
                        [&](const GaussianMixture& g) {
                          return "gmm(k=" + std::to_string(g.k) + ",radius=" + format_real(g.radius) +
                                 ",sigma=" + format_real(g.sigma) + "," + n + ")";
                        },
                        [&](const TwoMoons& m) { return "moons(noise=" + format_real(m.noise) + "," + n + ")"; },
                        [&](const Checkerboard& c) {
                          return "checkerboard(cells=" + std::to_string(c.cells) + "," + n + ")";
                        },
                        [&](const SinglePoint& p) {
                          std::string coords;
                          for (std::size_t i = 0; i < p.x0.size(); ++i) coords += (i ? ":" : "") + format_real(p.x0[i]);
                          return "point(x=" + coords + "," + n + ")";
                        },
                    },
                    spec.shape);
}

DatasetSpec parse_dataset(std::string_view text) {
  using descriptor::parse_real;
  using descriptor::parse_uint;
  const auto call = descriptor::parse_call(text, ',');
  DatasetSpec spec;
  if (call.name == "gmm") {
    descriptor::expect_keys(call, {"k", "radius", "sigma", "n"});
    GaussianMixture g;
    if (auto* v = call.find("k")) g.k = parse_uint(*v);
    if (auto* v = call.find("radius")) g.radius = parse_real(*v);
    if (auto* v = call.find("sigma")) g.sigma = parse_real(*v);
    spec.shape = g;
  } else if (call.name == "moons") {
    descriptor::expect_keys(call, {"noise", "n"});
    TwoMoons m;
    if (auto* v = call.find("noise")) m.noise = parse_real(*v);
    spec.shape = m;
  } else if (call.name == "checkerboard") {
    descriptor::expect_keys(call, {"cells", "n"});
    Checkerboard c;
    if (auto* v = call.find("cells")) c.cells = parse_uint(*v);
    spec.shape = c;
  } else if (call.name == "point") {
    descriptor::expect_keys(call, {"x", "n"});
    SinglePoint p;
    for (const auto& coord : descriptor::split_top_level(call.at("x"), ':')) p.x0.push_back(parse_real(coord));
    spec.shape = p;
  } else {
    throw FormatError("unknown dataset '" + call.name + "' (gmm, moons, checkerboard, point)");
  }
  if (auto* v = call.find("n")) spec.n_cache = parse_uint(*v);
  spec.validate();
  return spec;
}

}  // namespace flowcurl
