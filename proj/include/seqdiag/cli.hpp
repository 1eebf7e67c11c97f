#pragma once

#include <iosfwd>

namespace seqdiag {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;  // bad flags, unknown ids, model errors
inline constexpr int kExitIo = 3;

// Entry point of the `seqdiag` tool. Machine output goes to `out`,
// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqdiag
