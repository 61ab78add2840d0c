#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragrules/lattice.hpp"

namespace ragrules {

// Per-run counters. Level vectors are indexed by level size l (0..n); levels
// never reached after early termination stay at zero.
struct MineTelemetry {
  int n = 0;
  std::uint64_t model_calls = 0;  // requests that reached the client
  std::uint64_t cache_hits = 0;
  std::vector<std::uint64_t> evaluated_per_level;
  std::vector<std::uint64_t> pruned_per_level;
  // Set when the search stopped with levels still below it.
  std::optional<int> early_terminated_at;
  // Lowest level actually processed.
  std::optional<int> last_level;

  explicit MineTelemetry(int width = 0)
      : n(width),
        evaluated_per_level(width + 1, 0),
        pruned_per_level(width + 1, 0) {}

  std::uint64_t nodes_evaluated() const;
  std::uint64_t nodes_pruned() const;
  // Evaluated nodes over 2^n.
  double proportion_explored() const;
};

nlohmann::json to_json(const MineTelemetry& telemetry);

// Masks touched at one processed level; only filled when tracing is on.
struct LevelTrace {
  int level = 0;
  std::vector<SourceMask> evaluated;
  std::vector<SourceMask> pruned;
};

struct MineOptions {
  // Worker threads evaluating nodes within a level. Results are identical to
  // the sequential run for deterministic clients.
  int parallelism = 1;
  bool record_trace = false;
};

// Mining stopped because a node could not be judged. No rules are reported
// from an aborted run; the telemetry covers the work done until the failure.
class MineAborted : public std::runtime_error {
 public:
  MineAborted(SourceMask node, std::string cause, MineTelemetry telemetry);

  const SourceMask& node() const { return node_; }
  const std::string& cause() const { return cause_; }
  const MineTelemetry& telemetry() const { return telemetry_; }

 private:
  SourceMask node_;
  std::string cause_;
  MineTelemetry telemetry_;
};

}  // namespace ragrules
