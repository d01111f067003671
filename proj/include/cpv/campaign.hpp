#pragma once

#include "cpv/aeb.hpp"
#include "cpv/assurance.hpp"

#include <optional>
#include <string>

namespace cpv {

// Exit-code contract shared by the CLI so CI can gate without parsing
// output: 0 success, 2 spec/validation/render error, 3 bound below the
// spec-declared floor, 4 independence violation.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitFloor = 3,
  kExitIndependence = 4,
};

struct SpecValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A campaign spec (JSON file): either a built-in AEB pipeline
//   {"scenario": "aeb", "mode": "naive"|"optimized", "samples": N,
//    "confidence": C, "seed": S, ...}
// or a generic operator pipeline over named evidence sources
//   {"scenario": "aeb", "sources": {...}, "pipeline": {...}, ...}.
struct CampaignSpec {
  std::string name;
  std::string scenario = "aeb";
  std::optional<aeb::CampaignMode> mode;  // built-in pipeline when set
  std::string sources_json;               // raw JSON for generic pipelines
  std::string pipeline_json;
  std::uint64_t samples = 1000;
  double budget_seconds = 0.0;  // when > 0, converted to a sample count once
  double confidence = 0.999;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double floor = 0.0;
  bool timing = false;

  std::string effective_config_json() const;
};

struct CampaignOverrides {
  std::optional<std::uint64_t> samples;
  std::optional<double> confidence;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
};

CampaignSpec parse_campaign_spec(const std::string& json_text);
CampaignSpec load_campaign_spec(const std::string& path);
void apply_overrides(CampaignSpec& spec, const CampaignOverrides& overrides);

struct CampaignOutputs {
  EvidencePtr top;
  std::string case_text;
  std::string evidence_json;
  std::string summary_csv;
  double wall_seconds = 0.0;
};

// Executes the spec. Flag-style overrides beat file values; the effective
// config is embedded in the evidence JSON for audit.
CampaignOutputs run_campaign_spec(const CampaignSpec& spec, std::ostream* trace_log = nullptr);

// ---- CLI command bodies (also used by tests) ----

int cmd_verify(const std::string& spec_path, const CampaignOverrides& overrides,
               const std::string& out_dir, const std::string& trace_log_path,
               std::ostream& out, std::ostream& err);
int cmd_case(const std::string& evidence_path, std::ostream& out, std::ostream& err);
int cmd_table(const std::string& spec_path, const std::vector<std::uint64_t>& budgets,
              std::uint64_t seed, const std::string& out_path, std::ostream& out,
              std::ostream& err);
int cmd_replay(const std::string& log_path, const std::string& spec_path, std::ostream& out,
               std::ostream& err);
int cmd_selftest(std::ostream& out, std::ostream& err);

}  // namespace cpv
