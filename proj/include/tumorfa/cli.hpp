#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tumorfa {

/// Entry point of the `tumorfa` command. Returns the process exit code:
/// 0 on success, 2 on a command-line usage error, 1 on any other failure.
int cli_main(int argc, const char* const* argv);

/// Same, with explicit arguments (argv[0] excluded) and output streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tumorfa
