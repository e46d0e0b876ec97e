#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pubcat {

/// Admin command line. Returns 0 on success, 1 on a domain error (reported
/// on `err` as "CODE: message") and 2 on a usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pubcat
