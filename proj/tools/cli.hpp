#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace kickmix::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2 };

/// Bad flags, unreadable inputs or schema violations; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs one invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommand bodies, shared with the dispatcher in cli.cpp.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
int run_estimate(const std::string& scenario_path, const std::string& output_path, const std::string& salvage_csv,
                 const std::string& sweep_csv, std::ostream& out);

}  // namespace kickmix::cli
