#pragma once

// Subcommands of the gsim pipeline. Each stage reads and writes files only.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gsim::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct PipelineConfig {
  std::size_t top_k = 600;
  double tau = 0.8;
  double tolerance = 1e-6;
  std::size_t max_iterations = 100;
  unsigned workers = 0;
  std::string format = "edgelist";
  std::string phi_precision = "f64";
  std::string delimiter = ",";
  bool skip_header = false;
  std::uint64_t seed = 1;
  std::vector<std::string> inputs;
  std::string output;
  std::string manifest;
};

// Parses argv (without the program name) and runs one subcommand. Errors are
// reported on `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Lowercase hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

}  // namespace gsim::cli
