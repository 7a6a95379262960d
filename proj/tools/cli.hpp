#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bspn::cli {

// Exit codes of the bspn tool.
enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

// Runs one command line (args excludes the program name). Reports go to out,
// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_main(int argc, char** argv);

}  // namespace bspn::cli
