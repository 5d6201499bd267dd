#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace star {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Entry point shared by the `star_denoise` binary and the tests. Errors are
/// reported as a single JSON line on `err`:
///   {"error":"FormatError","message":"..."}
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace star
