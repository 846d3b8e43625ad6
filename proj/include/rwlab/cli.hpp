#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rwlab {

// Parses args (without the program name), runs one subcommand, writes the report or an
// error object to out. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rwlab
