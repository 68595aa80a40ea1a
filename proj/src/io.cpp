#include "grovercav/io.hpp"

#include <cstdio>

namespace grovercav {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace grovercav
