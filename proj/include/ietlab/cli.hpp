#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ietlab/json_io.hpp"

namespace ietlab {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitVerification = 4;

// One CLI invocation. Optional fields fall back to per-command defaults.
struct RunConfig {
  std::string command;
  std::string iet_path;
  std::string output_path;  // "" writes to stdout
  std::uint64_t seed = 1;
  std::optional<std::string> epsilon;
  std::vector<long long> n;
  std::optional<int> depth;
  std::optional<std::string> interval;  // "lo,hi"
  std::optional<long long> step_cap;
  std::string certificate_path;
  std::optional<long long> samples;
  std::optional<long long> j, k;
  std::optional<long long> idoc_depth;
};

const std::vector<std::string>& cli_commands();

// Strict: unknown fields or wrong types throw ParseError. Relative paths are
// resolved against base_dir.
RunConfig config_from_json(const json& j, const std::string& base_dir);

// "500", "10,20,40" or "0..3" (inclusive).
std::vector<long long> parse_n_list(const std::string& text);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command line without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ietlab
