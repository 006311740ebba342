#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spiky {

/// Entry point behind the command-line tool. Exit status 0 on success,
/// 1 on verification failure, 2 on usage or computational errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace spiky
