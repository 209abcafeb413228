#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spielm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O or runtime failure
inline constexpr int kExitUsage = 2;    // invalid or missing flags

/// Runs one subcommand (gen, svd, diagnose, solve-pde). `args` excludes the
/// program name. Numerical non-convergence is reported in the outputs and
/// still exits with kExitOk.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spielm
