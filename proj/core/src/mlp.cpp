#include "flowcurl/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flowcurl/error.hpp"
#include "flowcurl/parallel.hpp"

namespace flowcurl {
namespace {

constexpr std::size_t kPredictBlockRows = 256;

double activate(Activation act, double x) {
  switch (act) {
    case Activation::kSiLU:
      return x / (1.0 + std::exp(-x));
    case Activation::kReLU:
      return x > 0.0 ? x : 0.0;
    case Activation::kTanh:
      return std::tanh(x);
  }
  return x;
}

double activation_slope(Activation act, double pre, double post) {
  switch (act) {
    case Activation::kSiLU: {
      const double s = 1.0 / (1.0 + std::exp(-pre));
      return s * (1.0 + pre * (1.0 - s));
    }
    case Activation::kReLU:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh:
      return 1.0 - post * post;
  }
  return 1.0;
}

void check_inputs(const MlpConfig& cfg, const ParamVector& params, const Matrix& z,
                  std::span<const double> t) {
  if (params.size() != cfg.parameter_count())
    throw ShapeError("parameter vector has " + std::to_string(params.size()) + " values, config needs " +
                     std::to_string(cfg.parameter_count()));
  if (z.cols() != cfg.in_dim)
    throw ShapeError("input has " + std::to_string(z.cols()) + " columns, expected " +
                     std::to_string(cfg.in_dim));
  if (t.size() != z.rows()) throw ShapeError("time vector length differs from batch size");
  if (!z.all_finite()) throw InputError("non-finite network input");
  for (double v : t)
    if (!std::isfinite(v)) throw InputError("non-finite time input");
}

void fill_input_row(const MlpConfig& cfg, std::span<const double> z, double t, std::span<double> row) {
  std::copy(z.begin(), z.end(), row.begin());
  time_embed_into(t, cfg.time_features, row.subspan(cfg.in_dim));
}

// y = x W + b for `rows` rows, W stored input-major.
void dense(const ParamVector& params, const LayerShape& layer, const double* x, std::size_t rows,
           double* y) {
  const double* w = params.values.data() + layer.weight_offset;
  const double* b = params.values.data() + layer.bias_offset;
  for (std::size_t r = 0; r < rows; ++r) std::copy(b, b + layer.fan_out, y + r * layer.fan_out);
  kernels::gemm_acc(rows, layer.fan_out, layer.fan_in, x, layer.fan_in, 1, w, layer.fan_out, y,
                    layer.fan_out);
}

}  // namespace

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::kSiLU:
      return "silu";
    case Activation::kReLU:
      return "relu";
    case Activation::kTanh:
      return "tanh";
  }
  return "?";
}

Activation parse_activation(std::string_view text) {
  if (text == "silu") return Activation::kSiLU;
  if (text == "relu") return Activation::kReLU;
  if (text == "tanh") return Activation::kTanh;
  throw FormatError("unknown activation '" + std::string(text) + "' (silu, relu, tanh)");
}

std::size_t MlpConfig::parameter_count() const noexcept {
  std::size_t count = 0;
  std::size_t fan_in = input_width();
  for (std::size_t width : hidden) {
    count += fan_in * width + width;
    fan_in = width;
  }
  return count + fan_in * in_dim + in_dim;
}

void MlpConfig::validate() const {
  if (in_dim == 0) throw DomainError("network in_dim must be positive");
  for (std::size_t width : hidden)
    if (width == 0) throw DomainError("hidden layer widths must be positive");
  if (time_features > 60) throw DomainError("time_features above 60 overflow the Fourier frequencies");
  if (static_cast<std::uint32_t>(activation) > 2) throw DomainError("unknown activation id");
}

std::vector<LayerShape> layer_layout(const MlpConfig& cfg) {
  std::vector<LayerShape> layers;
  layers.reserve(cfg.layer_count());
  std::size_t fan_in = cfg.input_width();
  std::size_t offset = 0;
  auto add = [&](std::size_t fan_out) {
    layers.push_back({fan_in, fan_out, offset, offset + fan_in * fan_out});
    offset += fan_in * fan_out + fan_out;
    fan_in = fan_out;
  };
  for (std::size_t width : cfg.hidden) add(width);
  add(cfg.in_dim);
  return layers;
}

bool ParamVector::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double ParamVector::norm() const noexcept {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

ParamVector init_params(const MlpConfig& cfg, Rng& rng) {
  cfg.validate();
  ParamVector params(cfg.parameter_count(), 0.0);
  for (const auto& layer : layer_layout(cfg)) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.fan_in));
    for (std::size_t i = 0; i < layer.fan_in * layer.fan_out; ++i)
      params.values[layer.weight_offset + i] = bound * (2.0 * rng.uniform() - 1.0);
  }
  return params;
}

void time_embed_into(double t, std::size_t k, std::span<double> out) {
  if (out.size() != 2 * k + 1) throw ShapeError("time embedding buffer has wrong size");
  out[0] = t;
  double freq = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < k; ++j, freq *= 2.0) {
    out[1 + 2 * j] = std::sin(freq * t);
    out[2 + 2 * j] = std::cos(freq * t);
  }
}

std::vector<double> time_embed(double t, std::size_t k) {
  std::vector<double> features(2 * k + 1);
  time_embed_into(t, k, features);
  return features;
}

Tape forward(const ParamVector& params, const MlpConfig& cfg, const Matrix& z,
             std::span<const double> t) {
  check_inputs(cfg, params, z, t);
  const auto layers = layer_layout(cfg);
  const std::size_t rows = z.rows();
  Tape tape;
  tape.input = Matrix(rows, cfg.input_width());
  for (std::size_t r = 0; r < rows; ++r) fill_input_row(cfg, z.row(r), t[r], tape.input.row(r));

  const Matrix* x = &tape.input;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    Matrix pre(rows, layers[l].fan_out);
    dense(params, layers[l], x->data(), rows, pre.data());
    Matrix post(rows, layers[l].fan_out);
    for (std::size_t i = 0; i < pre.size(); ++i)
      post.data()[i] = activate(cfg.activation, pre.data()[i]);
    tape.pre.push_back(std::move(pre));
    tape.post.push_back(std::move(post));
    x = &tape.post.back();
  }
  tape.output = Matrix(rows, cfg.in_dim);
  dense(params, layers.back(), x->data(), rows, tape.output.data());
  return tape;
}

void predict(const ParamVector& params, const MlpConfig& cfg, const Matrix& z,
             std::span<const double> t, Matrix& out) {
  check_inputs(cfg, params, z, t);
  const auto layers = layer_layout(cfg);
  const std::size_t rows = z.rows();
  if (out.rows() != rows || out.cols() != cfg.in_dim) out = Matrix(rows, cfg.in_dim);
  std::size_t widest = cfg.input_width();
  for (const auto& layer : layers) widest = std::max(widest, layer.fan_out);

  const std::size_t blocks = (rows + kPredictBlockRows - 1) / kPredictBlockRows;
  parallel_for(blocks, [&](std::size_t blk) {
    const std::size_t first = blk * kPredictBlockRows;
    const std::size_t count = std::min(kPredictBlockRows, rows - first);
    std::vector<double> a(count * widest);
    std::vector<double> b(count * widest);
    const std::size_t in_w = cfg.input_width();
    for (std::size_t r = 0; r < count; ++r)
      fill_input_row(cfg, z.row(first + r), t[first + r], std::span(a.data() + r * in_w, in_w));
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
      dense(params, layers[l], a.data(), count, b.data());
      for (std::size_t i = 0; i < count * layers[l].fan_out; ++i) b[i] = activate(cfg.activation, b[i]);
      std::swap(a, b);
    }
    dense(params, layers.back(), a.data(), count, out.data() + first * cfg.in_dim);
  });
}

std::vector<double> forward(const ParamVector& params, const MlpConfig& cfg,
                            std::span<const double> z, double t) {
  Matrix row(1, z.size(), std::vector<double>(z.begin(), z.end()));
  const double times[1] = {t};
  Matrix out;
  predict(params, cfg, row, times, out);
  return std::vector<double>(out.values().begin(), out.values().end());
}

ParamVector backward(const ParamVector& params, const MlpConfig& cfg, const Tape& tape,
                     const Matrix& output_grad) {
  const auto layers = layer_layout(cfg);
  const std::size_t rows = tape.batch();
  if (params.size() != cfg.parameter_count()) throw ShapeError("parameter/config mismatch in backward");
  if (tape.input.cols() != cfg.input_width() || tape.pre.size() != cfg.hidden.size() ||
      tape.output.rows() != rows || tape.output.cols() != cfg.in_dim)
    throw ShapeError("tape does not match network config");
  for (std::size_t l = 0; l < cfg.hidden.size(); ++l)
    if (tape.pre[l].cols() != cfg.hidden[l] || tape.pre[l].rows() != rows)
      throw ShapeError("tape layer shape does not match network config");
  if (output_grad.rows() != rows || output_grad.cols() != cfg.in_dim)
    throw ShapeError("output gradient shape does not match tape");

  // W^T copies (fan_out x fan_in) feed the input-gradient products.
  std::vector<std::vector<double>> transposed(layers.size());
  for (std::size_t l = 1; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const double* w = params.values.data() + layer.weight_offset;
    auto& wt = transposed[l];
    wt.resize(layer.fan_in * layer.fan_out);
    for (std::size_t i = 0; i < layer.fan_in; ++i)
      for (std::size_t o = 0; o < layer.fan_out; ++o) wt[o * layer.fan_in + i] = w[i * layer.fan_out + o];
  }

  const std::size_t chunks = std::max<std::size_t>(1, (rows + kGradientChunkRows - 1) / kGradientChunkRows);
  std::vector<ParamVector> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    ParamVector grad(params.size(), 0.0);
    const std::size_t first = c * kGradientChunkRows;
    const std::size_t count = rows == 0 ? 0 : std::min(kGradientChunkRows, rows - first);
    std::vector<double> delta(output_grad.data() + first * cfg.in_dim,
                              output_grad.data() + (first + count) * cfg.in_dim);
    std::vector<double> upstream;
    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto& layer = layers[l];
      const Matrix& input = l == 0 ? tape.input : tape.post[l - 1];
      const double* a = input.data() + first * layer.fan_in;
      kernels::gemm_acc(layer.fan_in, layer.fan_out, count, a, 1, layer.fan_in, delta.data(),
                        layer.fan_out, grad.values.data() + layer.weight_offset, layer.fan_out);
      double* db = grad.values.data() + layer.bias_offset;
      for (std::size_t r = 0; r < count; ++r)
        for (std::size_t o = 0; o < layer.fan_out; ++o) db[o] += delta[r * layer.fan_out + o];
      if (l == 0) break;
      upstream.assign(count * layer.fan_in, 0.0);
      kernels::gemm_acc(count, layer.fan_in, layer.fan_out, delta.data(), layer.fan_out, 1,
                        transposed[l].data(), layer.fan_in, upstream.data(), layer.fan_in);
      const Matrix& pre = tape.pre[l - 1];
      const Matrix& post = tape.post[l - 1];
      for (std::size_t r = 0; r < count; ++r) {
        for (std::size_t i = 0; i < layer.fan_in; ++i) {
          const std::size_t at = (first + r) * layer.fan_in + i;
          upstream[r * layer.fan_in + i] *= activation_slope(cfg.activation, pre.data()[at], post.data()[at]);
        }
      }
      delta.swap(upstream);
    }
    partial[c] = std::move(grad);
  });

  // Pairwise tree over chunk gradients.
  std::size_t live = partial.size();
  while (live > 1) {
    const std::size_t half = live / 2;
    for (std::size_t i = 0; i < half; ++i) {
      // Slot i was already consumed as an operand (or is operand 2i itself), so overwrite it.
      auto& dst = partial[i].values;
      const auto& lhs = partial[2 * i].values;
      const auto& rhs = partial[2 * i + 1].values;
      dst.resize(lhs.size());
      for (std::size_t k = 0; k < lhs.size(); ++k) dst[k] = lhs[k] + rhs[k];
    }
    if (live % 2 == 1) partial[half] = std::move(partial[live - 1]);
    live = half + live % 2;
  }
  return std::move(partial.front());
}

}  // namespace flowcurl
