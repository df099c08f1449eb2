#pragma once

// Command-line harness. Subcommands: generate, fit, sweep, select-k,
// ingest, evaluate. Exit codes: 0 success, 1 usage or configuration error,
// 2 data or I/O error, 3 numerical failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace spabm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spabm::cli
