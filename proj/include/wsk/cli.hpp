#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wsk {

// Command-line front end. Commands: params, eval, verify, apply; plain
// key=value arguments. Exit codes: 0 success, 1 suite failure, 2 usage or
// parity error, 3 convergence refusal.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsk
