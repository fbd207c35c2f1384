#pragma once

#include <stdexcept>
#include <string>

#include "diot/protocol.hpp"
#include "diot/transcript.hpp"

namespace diot::harness {

using proto::json;

// Config problems exit with status 2; failed run assertions with status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Ot1, Selftest, EstimateDelta, Ot4, Attack, BoundsCheck };

ExperimentKind kind_from_string(const std::string& s);
std::string kind_to_string(ExperimentKind k);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Ot1;
  proto::ProtocolConfig config;
  int trials = 1;
  std::string out_path;         // JSON-lines report; empty writes no file
  std::string transcripts_dir;  // when set, ot1/ot4 trials persist transcripts
  json extra = json::object();  // kind-specific options (device, attack, ...)
};

// Parses {"kind": ..., "config": {...}, "trials": ..., "out": ...,
// "transcripts_dir": ..., ...extra}. Throws ConfigError with a diagnostic
// naming any violated parameter relation.
ExperimentSpec spec_from_json(const json& j);
json spec_to_json(const ExperimentSpec& spec);

struct RunResult {
  bool pass = false;  // all assertions for this experiment kind held
  json summary;
  std::string report;  // full JSONL content, also written to out_path
};

RunResult run_experiment(const ExperimentSpec& spec);

// --- Transcript replay ---------------------------------------------------------

struct ReplayResult {
  bool ok = false;
  std::string divergent_field;  // first mismatch, empty when ok
  std::string message;
};

// Recomputes every derived value in a persisted transcript (corrections,
// verdicts, abort decision, hash outputs) and compares bit-exactly. Parse
// and format problems throw ConfigError.
ReplayResult replay_transcript_file(const std::string& path);
ReplayResult replay_transcript_json(const json& j);

// --- Numeric suites for the bounds_check experiment ------------------------------

struct BoundsReport {
  int chain_rule_cases = 0, chain_rule_violations = 0;
  int uncertainty_cases = 0, uncertainty_violations = 0;
  int privacy_amp_cases = 0, privacy_amp_violations = 0;
  int splitting_cases = 0, splitting_violations = 0;
  json to_json() const;
  bool clean() const;
};

BoundsReport run_bounds_suites(std::uint64_t seed);

}  // namespace diot::harness
