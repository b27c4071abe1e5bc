#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace edumine::cli {

/// Runs one subcommand (prepare, eda, synth, train, score, evaluate,
/// pipeline). `args` excludes the program name. Returns 0 on success, 2 for
/// usage and file errors, 1 for anything else.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edumine::cli
