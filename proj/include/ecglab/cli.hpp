#pragma once

#include <iosfwd>

namespace ecglab::cli {

/// Parses the command line, runs the chosen subcommand and returns the exit
/// status: 0 on success, 1 on a runtime failure, 2 on a usage or
/// configuration error.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecglab::cli
