#include "ragrules/report.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#include "ragrules/digest.hpp"
#include "ragrules/errors.hpp"

namespace ragrules {

namespace {

using nlohmann::json;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

json masks_to_json(const std::vector<SourceMask>& masks) {
  json out = json::array();
  for (const auto& mask : masks) out.push_back(mask_to_json(mask));
  return out;
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += (i + 1 == labels.size()) ? " and " : ", ";
    out += labels[i];
  }
  return out;
}

[[noreturn]] void malformed(const std::string& what) {
  throw LoadError("malformed report: " + what);
}

}  // namespace

json mask_to_json(const SourceMask& mask) {
  return {{"mask", mask.bits()}, {"sources", mask.indices()}};
}

json report_envelope(const ReportHeader& header, const InputSet& input_set) {
  json sources = json::array();
  for (int i = 0; i < input_set.size(); ++i) {
    const auto& source = input_set.sources()[i];
    sources.push_back({{"index", i + 1},
                       {"label", source.label},
                       {"sha256", sha256_hex(source.text)}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"tool", kToolName},
          {"tool_version", kToolVersion},
          {"generated_at",
           header.generated_at.empty() ? utc_now() : header.generated_at},
          {"config_digest", header.config_digest},
          {"seed", header.seed},
          {"mode", header.mode},
          {"n", input_set.size()},
          {"sources", sources},
          {"rules", json::object()}};
}

void add_rules(json& report, Interpretation interpretation,
               const std::string& description,
               const std::vector<SourceMask>& valid,
               const std::vector<SourceMask>& minimal) {
  report["rules"][std::string(to_string(interpretation))] = {
      {"description", description},
      {"valid", masks_to_json(valid)},
      {"minimal", masks_to_json(minimal)}};
}

json mono_report(const ReportHeader& header, const InputSet& input_set,
                 const MonoResult& result, const std::string& description) {
  json report = report_envelope(header, input_set);
  add_rules(report, result.interpretation, description, result.valid,
            result.minimal);
  report["telemetry"] = to_json(result.telemetry);
  return report;
}

json dual_report(const ReportHeader& header, const InputSet& input_set,
                 const DualResult& result,
                 const std::string& retention_description,
                 const std::string& omission_description) {
  json report = report_envelope(header, input_set);
  add_rules(report, Interpretation::kRetention, retention_description,
            result.valid_retention, result.minimal_retention);
  add_rules(report, Interpretation::kOmission, omission_description,
            result.valid_omission, result.minimal_omission);
  report["telemetry"] = to_json(result.telemetry);
  return report;
}

json oracle_report(const ReportHeader& header, const InputSet& input_set,
                   const OracleResult& result, const std::string& description) {
  json report = report_envelope(header, input_set);
  add_rules(report, result.interpretation, description, result.valid,
            minimal_rules(result.valid));
  report["telemetry"] = {{"model_calls", result.evaluations}};
  report["satisfaction"] = satisfaction_to_json(result);
  return report;
}

json verify_report(const ReportHeader& header, const InputSet& input_set,
                   const SourceMask& mask, Interpretation interpretation,
                   bool valid, std::uint64_t judgments) {
  json report = report_envelope(header, input_set);
  report["verify"] = {{"rule", mask_to_json(mask)},
                      {"interpretation", to_string(interpretation)},
                      {"valid", valid}};
  report["telemetry"] = {{"model_calls", judgments}};
  return report;
}

std::string explain_report(const json& report) {
  if (!report.is_object()) malformed("not a JSON object");
  if (!report.contains("schema_version") ||
      !report["schema_version"].is_number_integer()) {
    malformed("missing schema_version");
  }
  if (report["schema_version"].get<int>() != kReportSchemaVersion) {
    malformed("unsupported schema_version " +
              report["schema_version"].dump());
  }
  if (!report.contains("sources") || !report["sources"].is_array()) {
    malformed("missing sources");
  }
  std::vector<std::string> labels;
  for (const auto& source : report["sources"]) {
    if (!source.is_object() || !source.contains("label") ||
        !source["label"].is_string()) {
      malformed("source without a label");
    }
    labels.push_back(source["label"].get<std::string>());
  }

  std::ostringstream out;
  if (report.contains("verify")) {
    const auto& verify = report["verify"];
    if (!verify.is_object() || !verify.contains("valid") ||
        !verify["valid"].is_boolean()) {
      malformed("verify block");
    }
    out << (verify["valid"].get<bool>() ? "valid" : "invalid") << '\n';
  }
  if (!report.contains("rules") || !report["rules"].is_object()) {
    malformed("missing rules");
  }
  for (const char* name : {"retention", "omission"}) {
    if (!report["rules"].contains(name)) continue;
    const auto& block = report["rules"][name];
    if (!block.is_object() || !block.contains("minimal") ||
        !block["minimal"].is_array() || !block.contains("description") ||
        !block["description"].is_string()) {
      malformed(std::string(name) + " rules");
    }
    std::string description = block["description"].get<std::string>();
    if (!description.empty() && description.back() == '.') description.pop_back();
    if (block["minimal"].empty()) {
      out << "No valid rules exist for this predicate.\n";
      continue;
    }
    const std::string verb = std::string(name) == "retention" ? "retained" : "omitted";
    for (const auto& rule : block["minimal"]) {
      if (!rule.is_object() || !rule.contains("sources") ||
          !rule["sources"].is_array()) {
        malformed("rule without sources");
      }
      std::vector<std::string> names;
      for (const auto& index : rule["sources"]) {
        if (!index.is_number_integer()) malformed("non-integer source index");
        const int i = index.get<int>();
        if (i < 1 || i > static_cast<int>(labels.size())) {
          malformed("source index " + std::to_string(i) + " out of range");
        }
        names.push_back(labels[i - 1]);
      }
      if (names.empty()) {
        out << "The predicate holds for every subset of sources.\n";
      } else {
        out << "If " << join_labels(names) << (names.size() == 1 ? " is " : " are ")
            << verb << ", then " << description << ".\n";
      }
    }
  }
  return out.str();
}

}  // namespace ragrules
