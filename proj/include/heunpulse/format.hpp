#pragma once

#include <charconv>
#include <string>

namespace heunpulse {

/// Shortest round-trip-safe text for a double at 17 significant digits,
/// independent of the C locale.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace heunpulse
