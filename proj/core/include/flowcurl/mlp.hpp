#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowcurl/matrix.hpp"
#include "flowcurl/rng.hpp"

namespace flowcurl {

enum class Activation : std::uint32_t { kSiLU = 0, kReLU = 1, kTanh = 2 };

std::string_view to_string(Activation act);
Activation parse_activation(std::string_view text);

/// Velocity network v(z, t): the input row is [z, t, sin/cos Fourier features of t],
/// followed by `hidden` activated dense layers and a linear head of width in_dim.
struct MlpConfig {
  std::size_t in_dim = 2;
  std::vector<std::size_t> hidden{256, 256, 256};
  std::size_t time_features = 8;
  Activation activation = Activation::kSiLU;

  std::size_t input_width() const noexcept { return in_dim + 2 * time_features + 1; }
  std::size_t layer_count() const noexcept { return hidden.size() + 1; }
  std::size_t parameter_count() const noexcept;
  void validate() const;

  friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

/// Placement of one dense layer inside the flat parameter vector. Weights are stored
/// input-major (W[i][o] at weight_offset + i * fan_out + o), then the fan_out biases.
struct LayerShape {
  std::size_t fan_in;
  std::size_t fan_out;
  std::size_t weight_offset;
  std::size_t bias_offset;
};

std::vector<LayerShape> layer_layout(const MlpConfig& cfg);

struct ParamVector {
  std::vector<double> values;

  ParamVector() = default;
  explicit ParamVector(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit ParamVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const noexcept { return values.size(); }
  std::span<double> span() noexcept { return values; }
  std::span<const double> span() const noexcept { return values; }
  bool all_finite() const noexcept;
  double norm() const noexcept;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

/// Activations retained by a batched forward pass.
struct Tape {
  Matrix input;              // B x input_width
  std::vector<Matrix> pre;   // per hidden layer, B x width, before activation
  std::vector<Matrix> post;  // per hidden layer, after activation
  Matrix output;             // B x in_dim

  std::size_t batch() const noexcept { return input.rows(); }
};

/// Kaiming-uniform weights (bound sqrt(6 / fan_in)), zero biases.
ParamVector init_params(const MlpConfig& cfg, Rng& rng);

/// [t, sin(2 pi 2^j t), cos(2 pi 2^j t) for j < k].
std::vector<double> time_embed(double t, std::size_t k);
void time_embed_into(double t, std::size_t k, std::span<double> out);

/// Batched forward pass keeping the tape. z is B x in_dim, t has B entries.
Tape forward(const ParamVector& params, const MlpConfig& cfg, const Matrix& z,
             std::span<const double> t);

/// Single row. Bit-identical to the matching row of any batched call.
std::vector<double> forward(const ParamVector& params, const MlpConfig& cfg,
                            std::span<const double> z, double t);

/// Batched forward without a tape, blocked over rows; writes B x in_dim into `out`.
void predict(const ParamVector& params, const MlpConfig& cfg, const Matrix& z,
             std::span<const double> t, Matrix& out);

/// Gradient of sum_rj output_grad(r, j) * v_hat(r, j) with respect to the parameters.
/// Rows are processed in fixed chunks whose gradients are combined by a pairwise tree,
/// so the result does not depend on the worker count.
ParamVector backward(const ParamVector& params, const MlpConfig& cfg, const Tape& tape,
                     const Matrix& output_grad);

inline constexpr std::size_t kGradientChunkRows = 64;

}  // namespace flowcurl
