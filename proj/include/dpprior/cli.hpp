#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace dpprior {

enum class OutputFormat { Csv, Json };

/// Fully resolved invocation, echoed into every output header.
struct RunConfig {
  std::string subcommand;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::Csv;
  std::string output;  // empty: standard output
};

nlohmann::json to_json(const RunConfig& config);

/// Seed used when --seed is absent: $DPPRIOR_SEED if set, otherwise 0.
std::uint64_t default_seed();

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    // bad arguments, validation, domain errors
inline constexpr int kExitNumeric = 3;  // solver, convergence, propriety, infeasibility

/// Runs one command line (without the program name). Data goes to `out` or
/// the --output file, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpprior
