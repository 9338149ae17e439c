#include "flowcurl/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "flowcurl/csv.hpp"
#include "flowcurl/descriptor.hpp"
#include "flowcurl/error.hpp"

namespace flowcurl {
namespace {

constexpr std::uint32_t tag(const char (&s)[5]) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[0])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[3])) << 24;
}

constexpr std::uint32_t kTagEma = tag("EMA ");
constexpr std::uint32_t kTagAdam = tag("ADAM");
constexpr std::uint32_t kTagStep = tag("STEP");
constexpr std::uint32_t kTagConf = tag("CONF");

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void f64s(std::span<const double> vs) {
    for (double v : vs) f64(v);
  }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void text(const std::string& s) { out_.insert(out_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::vector<double> f64s(std::uint64_t n) {
    need(n * 8);
    std::vector<double> out(n);
    for (auto& v : out) v = f64();
    return out;
  }
  std::span<const std::uint8_t> take(std::uint64_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw FormatError("truncated binary payload");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::uint64_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// Checks magic and CRC, returns the payload between them.
std::span<const std::uint8_t> unwrap(std::span<const std::uint8_t> bytes, const char (&magic)[5]) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), magic, 4) != 0)
    throw FormatError(std::string("bad magic, expected ") + magic);
  const auto payload = bytes.subspan(4, bytes.size() - 8);
  Reader crc_reader(bytes.subspan(bytes.size() - 4));
  if (crc_reader.u32() != crc32(payload)) throw FormatError("CRC mismatch");
  return payload;
}

std::vector<std::uint8_t> wrap(Writer& payload, const char (&magic)[5]) {
  const std::uint32_t crc = crc32(payload.buffer());
  std::vector<std::uint8_t> out;
  out.reserve(payload.buffer().size() + 8);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(magic[i]));
  out.insert(out.end(), payload.buffer().begin(), payload.buffer().end());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));
  return out;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  constexpr std::size_t kPiece = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kPiece) {
    const std::size_t len = std::min(kPiece, bytes.size() - off);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  const std::size_t n = ckpt.model.parameter_count();
  if (ckpt.params.size() != n) throw ShapeError("checkpoint params do not match model config");
  Writer w;
  w.u32(static_cast<std::uint32_t>(ckpt.model.in_dim));
  w.u32(static_cast<std::uint32_t>(ckpt.model.hidden.size()));
  for (auto h : ckpt.model.hidden) w.u32(static_cast<std::uint32_t>(h));
  w.u32(static_cast<std::uint32_t>(ckpt.model.time_features));
  w.u32(static_cast<std::uint32_t>(ckpt.model.activation));
  w.u64(n);
  w.f64s(ckpt.params.values);
  if (ckpt.ema) {
    if (ckpt.ema->shadow.size() != n) throw ShapeError("checkpoint EMA shadow has wrong size");
    w.u32(kTagEma);
    w.u64(8 + 8 * n);
    w.f64(ckpt.ema->decay);
    w.f64s(ckpt.ema->shadow.values);
  }
  if (ckpt.adam) {
    if (ckpt.adam->m.size() != n || ckpt.adam->v.size() != n)
      throw ShapeError("checkpoint Adam state has wrong size");
    w.u32(kTagAdam);
    w.u64(8 + 16 * n);
    w.u64(ckpt.adam->step);
    w.f64s(ckpt.adam->m);
    w.f64s(ckpt.adam->v);
  }
  if (ckpt.step) {
    w.u32(kTagStep);
    w.u64(8);
    w.u64(*ckpt.step);
  }
  if (!ckpt.config_text.empty()) {
    w.u32(kTagConf);
    w.u64(ckpt.config_text.size());
    w.text(ckpt.config_text);
  }
  return wrap(w, "FCW1");
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(unwrap(bytes, "FCW1"));
  Checkpoint ckpt;
  ckpt.model.in_dim = r.u32();
  const std::uint32_t n_hidden = r.u32();
  if (n_hidden > 1024) throw FormatError("implausible hidden layer count");
  ckpt.model.hidden.resize(n_hidden);
  for (auto& h : ckpt.model.hidden) h = r.u32();
  ckpt.model.time_features = r.u32();
  const std::uint32_t act = r.u32();
  if (act > 2) throw FormatError("unknown activation id " + std::to_string(act));
  ckpt.model.activation = static_cast<Activation>(act);
  try {
    ckpt.model.validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid model config: ") + e.what());
  }
  const std::uint64_t n = r.u64();
  if (n != ckpt.model.parameter_count()) throw FormatError("parameter count does not match model config");
  ckpt.params = ParamVector(r.f64s(n));
  while (!r.done()) {
    const std::uint32_t section = r.u32();
    const std::uint64_t length = r.u64();
    Reader s(r.take(length));
    if (section == kTagEma) {
      if (length != 8 + 8 * n) throw FormatError("EMA section has wrong length");
      EmaState ema;
      ema.decay = s.f64();
      ema.shadow = ParamVector(s.f64s(n));
      ckpt.ema = std::move(ema);
    } else if (section == kTagAdam) {
      if (length != 8 + 16 * n) throw FormatError("ADAM section has wrong length");
      AdamState adam;
      adam.step = s.u64();
      adam.m = s.f64s(n);
      adam.v = s.f64s(n);
      ckpt.adam = std::move(adam);
    } else if (section == kTagStep) {
      if (length != 8) throw FormatError("STEP section has wrong length");
      ckpt.step = s.u64();
    } else if (section == kTagConf) {
      const auto text = s.take(length);
      ckpt.config_text.assign(text.begin(), text.end());
    }
    // Unknown sections are skipped.
  }
  return ckpt;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path.string(), "read failed");
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string(), "cannot create directory: " + ec.message());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string(), "cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(tmp.string(), "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(path.string(), "rename failed: " + ec.message());
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_bytes(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_samples(const Matrix& samples) {
  Writer w;
  w.u64(samples.rows());
  w.u32(static_cast<std::uint32_t>(samples.cols()));
  w.f64s(samples.values());
  return wrap(w, "FCS1");
}

Matrix decode_samples(std::span<const std::uint8_t> bytes) {
  Reader r(unwrap(bytes, "FCS1"));
  const std::uint64_t rows = r.u64();
  const std::uint32_t cols = r.u32();
  if (cols != 0 && rows > (std::uint64_t{1} << 40) / cols) throw FormatError("implausible sample count");
  Matrix m(rows, cols, r.f64s(rows * cols));
  if (!r.done()) throw FormatError("trailing bytes in sample file");
  return m;
}

void write_samples_binary(const std::filesystem::path& path, const Matrix& samples) {
  write_file_bytes(path, encode_samples(samples));
}

Matrix read_samples_binary(const std::filesystem::path& path) { return decode_samples(read_file_bytes(path)); }

void write_samples_csv(std::ostream& out, const Matrix& samples) {
  for (std::size_t j = 0; j < samples.cols(); ++j) out << (j ? ",x" : "x") << j;
  out << '\n';
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    for (std::size_t j = 0; j < samples.cols(); ++j)
      out << (j ? "," : "") << descriptor::format_real(samples(i, j));
    out << '\n';
  }
}

void write_samples_csv(const std::filesystem::path& path, const Matrix& samples) {
  std::ostringstream text;
  write_samples_csv(text, samples);
  const auto s = text.str();
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Matrix read_samples_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  Matrix m(table.rows.size(), table.header.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t j = 0; j < table.header.size(); ++j) m(i, j) = descriptor::parse_real(table.rows[i][j]);
  return m;
}

}  // namespace flowcurl
