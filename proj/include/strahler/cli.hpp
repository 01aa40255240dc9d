#ifndef STRAHLER_CLI_HPP
#define STRAHLER_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace strahler {

/// Dispatches a full command line (without argv[0]). Returns the process exit
/// code: 0 success, 1 malformed input, 2 budget or limit exceeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace strahler

#endif
