#pragma once

#include <cstdio>
#include <string>

namespace homsim {

// 17 significant digits: round-trip exact for IEEE doubles, so regression
// files diff cleanly across runs.
inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace homsim
