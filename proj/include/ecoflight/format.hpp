#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace ecoflight {

// Shortest representation that parses back to the same double. Used for every
// machine-readable file so that exports round-trip exactly and stay
// byte-stable across runs.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

// Fixed six-significant-digit rendering for human-facing summaries.
inline std::string format_sig6(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6g", v);
  return buf.data();
}

}  // namespace ecoflight
