#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jsvqa {

// Full command-line front end, in-process for testability.
// Exit codes: 0 success, 2 config error, 3 instance error, 4 runtime failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jsvqa
