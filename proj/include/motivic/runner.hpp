#pragma once

// Config-driven task runner behind the command-line tool.
//
// Config (JSON):
//   group:    "SL2" | "Ga^d" | "Gm^m"
//   sets:     name -> set text | "big_cell" | {"set": text, "complement": tag} | {"integral_stratum": e}
//   elements: name -> literal
//   tasks:    [{"kind": measure | invariance | identity | chart_independence | oracle | restriction, ...}]
//   output:   {"cutoff": int, "q_list": [int]}

#include "motivic/errors.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace motivic {

enum ExitCode : int { kPass = 0, kMismatch = 1, kSchema = 2, kUnsupported = 3, kDivergence = 4 };

class SchemaError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

struct RunOptions {
  bool parallel = false;
  std::optional<int> precision;
  std::optional<int> cutoff;
  std::uint64_t seed = 1;
};

struct RunOutcome {
  nlohmann::ordered_json report;
  int exit_code = kPass;
};

RunOutcome run_config(const nlohmann::json& config, const RunOptions& options);

/// Plain-text table of the report summary.
std::string render_summary(const nlohmann::ordered_json& report);

}  // namespace motivic
