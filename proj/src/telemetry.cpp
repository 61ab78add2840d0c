#include "ragrules/telemetry.hpp"

#include <cmath>
#include <numeric>

namespace ragrules {

std::uint64_t MineTelemetry::nodes_evaluated() const {
  return std::accumulate(evaluated_per_level.begin(), evaluated_per_level.end(),
                         std::uint64_t{0});
}

std::uint64_t MineTelemetry::nodes_pruned() const {
  return std::accumulate(pruned_per_level.begin(), pruned_per_level.end(),
                         std::uint64_t{0});
}

double MineTelemetry::proportion_explored() const {
  return static_cast<double>(nodes_evaluated()) / std::ldexp(1.0, n);
}

nlohmann::json to_json(const MineTelemetry& telemetry) {
  nlohmann::json out = {
      {"n", telemetry.n},
      {"model_calls", telemetry.model_calls},
      {"cache_hits", telemetry.cache_hits},
      {"nodes_evaluated", telemetry.nodes_evaluated()},
      {"nodes_pruned", telemetry.nodes_pruned()},
      {"proportion_explored", telemetry.proportion_explored()},
      {"evaluated_per_level", telemetry.evaluated_per_level},
      {"pruned_per_level", telemetry.pruned_per_level},
  };
  out["early_terminated_at"] =
      telemetry.early_terminated_at ? nlohmann::json(*telemetry.early_terminated_at)
                                    : nlohmann::json(nullptr);
  out["last_level"] = telemetry.last_level ? nlohmann::json(*telemetry.last_level)
                                           : nlohmann::json(nullptr);
  return out;
}

MineAborted::MineAborted(SourceMask node, std::string cause,
                         MineTelemetry telemetry)
    : std::runtime_error("mining aborted at node " + to_string(node) + ": " +
                         cause),
      node_(node),
      cause_(std::move(cause)),
      telemetry_(std::move(telemetry)) {}

}  // namespace ragrules
