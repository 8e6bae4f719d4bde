#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msynth {

/// Entry point behind the msynth binary, callable in-process for tests.
/// `args` excludes the program name. Returns the process exit code:
///   0 success (including --help)
///   1 unexpected error
///   2 configuration error
///   3 I/O error
///   4 training diverged (non-finite loss)
///   5 checkpoint mismatch
int runCli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace msynth
