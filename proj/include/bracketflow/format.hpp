#pragma once

#include <cstdio>
#include <string>

namespace bracketflow {

// %.17g rendering: enough digits for an exact double round trip, and a fixed
// format so repeated runs produce byte-identical files.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace bracketflow
