#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flowcurl::descriptor {

/// `name(key=value<sep>key=value...)` or a bare `name`.
struct Call {
  std::string name;
  std::vector<std::pair<std::string, std::string>> args;

  /// Value for key; throws FormatError when absent.
  const std::string& at(std::string_view key) const;
  const std::string* find(std::string_view key) const;
};

/// Splits on `sep` only at parenthesis depth zero; whitespace around tokens is dropped.
std::vector<std::string> split_top_level(std::string_view text, char sep);

Call parse_call(std::string_view text, char sep = ',');

/// Rejects keys outside `allowed` and duplicate keys.
void expect_keys(const Call& call, std::initializer_list<std::string_view> allowed);

std::string_view trim(std::string_view text);

/// Shortest representation that parses back to the same double.
std::string format_real(double value);
double parse_real(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

}  // namespace flowcurl::descriptor
