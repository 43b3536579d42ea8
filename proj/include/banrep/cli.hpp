#pragma once

// Command-line front end. Each subcommand reads a JSON config, runs one solver
// and writes a JSON result document.

#include <iosfwd>
#include <string>
#include <vector>

namespace banrep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

/// args[0] is the program name. Human-readable text goes to `out`/`err`; the
/// result document goes to --output, or to `out` when no output path is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace banrep::cli
