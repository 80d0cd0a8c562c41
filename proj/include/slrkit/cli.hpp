#ifndef SLRKIT_CLI_HPP
#define SLRKIT_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace slrkit {

inline constexpr int kExitPositive = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace slrkit

#endif
