#pragma once

#include <iosfwd>

namespace rrscale {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `rrscale` tool. Returns 0 on success, 1 when the library reports an
/// error and 2 on usage errors (unknown subcommand or flag, bad flag value).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rrscale
