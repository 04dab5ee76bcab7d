#pragma once

#include <charconv>
#include <string>

namespace crystal {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace crystal
