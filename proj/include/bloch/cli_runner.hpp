// Config-driven experiment runner behind the `bloch` executable.
//
// A run is described by one JSON object (file via --config and/or per-field
// flag overrides; flags win):
//
//   {
//     "command":       "basis" | "encode" | "decode" | "measure" |
//                      "interfere" | "decompose" | "rod" | "chsh",
//     "parameters":    { command-specific, unknown keys rejected },
//     "seed":          unsigned integer   (else $BLOCH_SEED, else 0),
//     "shots":         nonnegative integer, default 10000,
//     "workers":       positive integer, default 1,
//     "output_format": "json" | "csv", default "json",
//     "output_path":   optional file target (default: stdout)
//   }
//
// stdout carries exactly the result payload; logs and timing go to stderr.
// Identical (config, seed, workers) produce byte-identical payloads.  The
// echoed "config" inside a JSON payload is itself a valid config for replay.
// Failures print {"error": {...}} to stdout and exit nonzero.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "bloch/serialization.hpp"

namespace bloch {

inline constexpr const char* LIBRARY_VERSION = "0.1.0";

struct ExperimentConfig {
  std::string command;
  Json parameters = Json::object();
  std::uint64_t seed = 0;
  std::int64_t shots = 10000;
  int workers = 1;
  std::string output_format = "json";
  std::string output_path;
};

// Validates one merged config object (rejecting unknown keys by name) and
// applies the seed fallback chain.
ExperimentConfig parse_config(const Json& merged);

struct RunRecord {
  Json config_echo;   // replayable effective config
  Json results;
  std::string csv;    // tabular rendering of the same results
  double wall_time_s = 0.0;
  std::string library_version = LIBRARY_VERSION;
};

RunRecord execute(const ExperimentConfig& cfg);

// The stdout payload for "json" or "csv"; deterministic for a fixed record.
std::string render_payload(const RunRecord& record, const std::string& format);

// Full command-line entry point (argv parsing, config merge, execution,
// output routing).  Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bloch
