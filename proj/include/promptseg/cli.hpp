#pragma once

#include <iosfwd>

namespace promptseg::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_failure = 2;

/// Entry point of the `promptseg` tool. Returns 0 on success, 1 on a usage
/// error and 2 on a runtime failure.
int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err);

} // namespace promptseg::cli
