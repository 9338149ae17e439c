#include "flowcurl/descriptor.hpp"

#include <charconv>
#include <cmath>

#include "flowcurl/error.hpp"

namespace flowcurl::descriptor {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

const std::string* Call::find(std::string_view key) const {
  for (const auto& [k, v] : args)
    if (k == key) return &v;
  return nullptr;
}

const std::string& Call::at(std::string_view key) const {
  if (const auto* v = find(key)) return *v;
  throw FormatError("descriptor '" + name + "' is missing argument '" + std::string(key) + "'");
}

std::vector<std::string> split_top_level(std::string_view text, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth < 0) throw FormatError("unbalanced ')' in '" + std::string(text) + "'");
    } else if (c == sep && depth == 0) {
      parts.emplace_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw FormatError("unbalanced '(' in '" + std::string(text) + "'");
  parts.emplace_back(trim(text.substr(start)));
  return parts;
}

Call parse_call(std::string_view text, char sep) {
  text = trim(text);
  Call call;
  const auto open = text.find('(');
  if (open == std::string_view::npos) {
    call.name = std::string(text);
  } else {
    if (text.back() != ')') throw FormatError("expected ')' at end of '" + std::string(text) + "'");
    call.name = std::string(trim(text.substr(0, open)));
    const auto body = trim(text.substr(open + 1, text.size() - open - 2));
    if (!body.empty()) {
      for (const auto& part : split_top_level(body, sep)) {
        const auto eq = part.find('=');
        if (eq == std::string::npos)
          throw FormatError("expected key=value in '" + std::string(text) + "', got '" + part + "'");
        std::string key(trim(std::string_view(part).substr(0, eq)));
        std::string value(trim(std::string_view(part).substr(eq + 1)));
        if (call.find(key)) throw FormatError("duplicate argument '" + key + "' in '" + std::string(text) + "'");
        call.args.emplace_back(std::move(key), std::move(value));
      }
    }
  }
  if (call.name.empty()) throw FormatError("empty descriptor");
  return call;
}

void expect_keys(const Call& call, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : call.args) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw FormatError("unknown argument '" + key + "' for '" + call.name + "'");
  }
}

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
    throw FormatError("not a number: '" + std::string(text) + "'");
  return value;
}

std::uint64_t parse_uint(std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
    throw FormatError("not a non-negative integer: '" + std::string(text) + "'");
  return value;
}

}  // namespace flowcurl::descriptor
