#pragma once

#include <iosfwd>

namespace tvflow {

/// Exit codes of the command-line tool.
enum ExitStatus : int {
  kExitClean = 0,     // no findings
  kExitFindings = 1,  // at least one verification finding
  kExitError = 2,     // usage or data error
};

/// Entry point of the `tvflow` tool, with the streams injectable for tests.
/// Subcommands: crawl, verify, analyze-logs, compare, calibrate, serve.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tvflow
