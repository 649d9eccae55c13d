#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

/// Runs one experiment. args excludes the program name. The result document
/// goes to out (or the --out path); failures print one JSON line on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dlab::cli
