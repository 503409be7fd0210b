#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace rootkit {

/// Shortest representation that parses back to the same double. Locale independent.
inline std::string format_shortest(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

/// 17 significant digits, '.' decimal separator, no locale dependence.
inline std::string format_sig17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                           std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

}  // namespace rootkit
