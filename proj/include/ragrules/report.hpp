#pragma once

// Versioned JSON run reports and their plain-language rendering.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragrules/lattice.hpp"
#include "ragrules/miner_dual.hpp"
#include "ragrules/miner_mono.hpp"
#include "ragrules/oracle.hpp"

namespace ragrules {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kToolName = "ragrules";
inline constexpr std::string_view kToolVersion = "1.0.0";

// {"mask": 6, "sources": [2, 3]}
nlohmann::json mask_to_json(const SourceMask& mask);

struct ReportHeader {
  std::string mode;
  std::string config_digest;
  std::int64_t seed = 0;
  std::string generated_at;  // empty: filled with the current UTC time
};

// Common envelope: schema, tool, digest, seed and the source table (index,
// label, SHA-256 of the text).
nlohmann::json report_envelope(const ReportHeader& header,
                               const InputSet& input_set);

// Adds one interpretation's rules under report["rules"][interpretation].
void add_rules(nlohmann::json& report, Interpretation interpretation,
               const std::string& description,
               const std::vector<SourceMask>& valid,
               const std::vector<SourceMask>& minimal);

nlohmann::json mono_report(const ReportHeader& header, const InputSet& input_set,
                           const MonoResult& result,
                           const std::string& description);
nlohmann::json dual_report(const ReportHeader& header, const InputSet& input_set,
                           const DualResult& result,
                           const std::string& retention_description,
                           const std::string& omission_description);
nlohmann::json oracle_report(const ReportHeader& header,
                             const InputSet& input_set,
                             const OracleResult& result,
                             const std::string& description);
nlohmann::json verify_report(const ReportHeader& header,
                             const InputSet& input_set, const SourceMask& mask,
                             Interpretation interpretation, bool valid,
                             std::uint64_t judgments);

// One sentence per minimal rule, grouped by interpretation, e.g.
// "If D2 and D4 are retained, then the response contains misinformation."
// Throws LoadError on a report this tool could not have produced.
std::string explain_report(const nlohmann::json& report);

}  // namespace ragrules
