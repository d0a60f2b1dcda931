#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace angio::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation or solver failure
inline constexpr int kExitUsage = 2;

/// Entry point of the `angiosim` tool. `args` excludes the program name.
/// Machine-readable key=value lines go to `out`, diagnostics to `err`.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace angio::cli
