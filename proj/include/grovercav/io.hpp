#pragma once

#include <string>

namespace grovercav {

// Round-trip decimal text for doubles (17 significant digits, "%.17g").
std::string format_double(double x);

}  // namespace grovercav
