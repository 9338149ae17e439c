#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowcurl/matrix.hpp"
#include "flowcurl/mlp.hpp"
#include "flowcurl/optim.hpp"

namespace flowcurl {

/// Model weights plus optional optimizer state and provenance.
///
/// File layout (`FCW1`, little-endian throughout):
///   magic "FCW1"
///   u32 in_dim, u32 n_hidden, u32 hidden[n_hidden], u32 time_features, u32 activation
///   u64 n_params, f64 params[n_params]
///   zero or more sections: u32 tag, u64 byte_length, bytes
///     "EMA " f64 decay, f64 shadow[n_params]
///     "ADAM" u64 step, f64 m[n_params], f64 v[n_params]
///     "STEP" u64 training step
///     "CONF" rendered training config text
///   u32 CRC-32 of everything between the magic and the CRC
struct Checkpoint {
  MlpConfig model;
  ParamVector params;
  std::optional<EmaState> ema;
  std::optional<AdamState> adam;
  std::optional<std::uint64_t> step;
  std::string config_text;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
/// Throws FormatError on bad magic, CRC mismatch, or truncated/inconsistent payload.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// `FCS1` sample file: magic, u64 rows, u32 cols, f64 values row-major, u32 CRC-32.
std::vector<std::uint8_t> encode_samples(const Matrix& samples);
Matrix decode_samples(std::span<const std::uint8_t> bytes);
void write_samples_binary(const std::filesystem::path& path, const Matrix& samples);
Matrix read_samples_binary(const std::filesystem::path& path);

/// CSV with header `x0,x1,...`, values in shortest round-trip form.
void write_samples_csv(std::ostream& out, const Matrix& samples);
void write_samples_csv(const std::filesystem::path& path, const Matrix& samples);
Matrix read_samples_csv(const std::filesystem::path& path);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace flowcurl
