#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace lrlab::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumeric = 2, kResource = 3 };

struct Options {
  std::string config;
  std::string out = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

// Raised by commands for a tolerance breach after outputs are written.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_kernel(const Options& opt);
int cmd_greens(const Options& opt);
int cmd_saw(const Options& opt);
int cmd_perc(const Options& opt);
int cmd_riesz(const Options& opt);

// Runs a command and maps exceptions to exit codes, printing the diagnostic to stderr.
int run(int (*cmd)(const Options&), const Options& opt);

}  // namespace lrlab::cli
