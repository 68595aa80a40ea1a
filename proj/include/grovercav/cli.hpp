#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace grovercav::cli {

// Exit codes: 0 success, 1 I/O or numerical failure, 2 validation error or
// infeasible request.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;

// args excludes the program name, e.g. {"plan", "--n", "100", "--dicke", "50"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grovercav::cli
