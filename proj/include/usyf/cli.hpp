#pragma once

#include <string>
#include <vector>

namespace usyf::cli {

// Exit codes: 0 success, 2 bad configuration (message names the offending
// key), 3 missing input file, 1 other failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitMissingFile = 3;

// Runs one subcommand: generate | train | extract | evaluate | borda |
// leakage. args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace usyf::cli
