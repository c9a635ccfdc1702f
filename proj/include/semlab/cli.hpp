#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace semlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitUsage = 2,
  kExitInfeasible = 3,
};

/// Flags shared by the subcommands. Unused fields keep their defaults.
struct RunConfig {
  std::string subcommand;
  int degree = 3;
  std::string degrees = "1..15";
  std::string elements;
  std::string kernel = "buffered";
  std::string device;
  std::string input = "-";
  double tol = 1e-8;
  int max_iters = 1000;
  double deformation = 0.1;
  int fields = 100;
  int reps = 10;
  std::uint64_t seed = 42;
  std::string format;
  int threads = 0;
  std::int64_t bar_elements = 4096;
};

/// Runs one command line (args excludes the program name). Data goes to
/// `out`, diagnostics to `err`. Returns an ExitCode.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semlab
