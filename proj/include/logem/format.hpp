#pragma once

#include <cstdio>
#include <string>

namespace logem {

/// '.'-decimal, 17 significant digits; round-trips every double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace logem
