#pragma once

#include <iosfwd>

namespace ineq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // domain, data or I/O error
inline constexpr int kExitUsage = 2;    // flag grammar violated

// Parses argv (argv[0] is the program name) and runs one subcommand:
// simulate, fp, fit-income, energy or verify. Data goes to files and `out`,
// diagnostics to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ineq::cli
