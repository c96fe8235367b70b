#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modrec::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kDataError = 2,
    kOracleFailure = 3,
};

// Entry point of the `modrec` command-line tool. args excludes the program
// name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace modrec::cli
