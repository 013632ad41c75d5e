#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iit/exemplar.hpp"
#include "iit/pipeline.hpp"

namespace iit::cli {

// Thrown by parse_args on invalid flag combinations; maps to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Thrown by parse_args when --help was requested; maps to exit code 0.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

struct CliConfig {
  enum class Command { none, transfer, hdr, clahe, remap, verify };

  Command command = Command::none;
  std::string input;
  std::string exemplar;  // empty: synthesize via CLAHE
  std::string output;
  std::string report;  // empty: no report written

  IitParams iit{};
  HdrParams hdr{};
  ClaheParams clahe{};
  RemapParams remap{};
  KernelParams remap_kernel{};  // smoothing split used by the remap demo
  std::uint64_t seed = 20240901;
};

// Parses and validates argv (without the program name). Throws UsageError on
// bad input and HelpRequested after printing help text to stdout.
CliConfig parse_args(const std::vector<std::string>& args);

// Executes the selected pipeline. Exit codes: 0 success, 1 usage error,
// 2 processing error, 3 solver non-convergence (partial result written).
int run(const CliConfig& config);

// parse_args + run with error-to-exit-code mapping; the actual main().
int main_entry(int argc, const char* const* argv);

}  // namespace iit::cli
