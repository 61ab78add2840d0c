#pragma once

// Dual rule miner: mines retention and omission rules in one pass.
//
// Each lattice mask is read two ways. Under retention the model sees the
// mask's sources; under omission it sees the complement. Each type keeps its
// own invalid frontier, and a node is skipped only when both frontiers hold
// it. Surviving nodes carry per-type flags that skip the inference for a
// type already known to be invalid there.

#include <cstdint>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragrules/lattice.hpp"
#include "ragrules/model.hpp"
#include "ragrules/predicate.hpp"
#include "ragrules/telemetry.hpp"

namespace ragrules {

// Model responses keyed by the concrete retained mask. Retention node m and
// omission node complement(m) share a key. Safe under concurrent use;
// concurrent requests for the same key wait on the first one.
class ResponseCache {
 public:
  // max_bytes == 0 means unbounded. Responses that would push the stored
  // total past the bound are served but not kept.
  explicit ResponseCache(std::size_t max_bytes = 0) : max_bytes_(max_bytes) {}

  struct Lookup {
    std::string output;
    bool hit = false;
  };
  Lookup get_or_compute(std::uint64_t key,
                        const std::function<std::string()>& compute);

  std::size_t entries() const;
  std::size_t bytes() const;
  std::uint64_t dropped() const;

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::uint64_t, std::shared_future<std::string>> entries_;
  std::size_t max_bytes_;
  std::size_t bytes_ = 0;
  std::uint64_t dropped_ = 0;
};

struct DualOptions : MineOptions {
  bool cache_enabled = false;
  std::size_t cache_max_bytes = 0;
};

struct DualTelemetry {
  // model_calls / cache_hits are totals across both interpretations.
  // evaluated_per_level counts nodes that survived joint pruning.
  MineTelemetry combined;
  std::uint64_t retention_evaluations = 0;  // judged by the retention predicate
  std::uint64_t omission_evaluations = 0;
  // Level after which a type produced no more rules.
  std::optional<int> retention_exhausted_at;
  std::optional<int> omission_exhausted_at;
  bool cache_enabled = false;
  std::size_t cache_entries = 0;
  std::size_t cache_bytes = 0;
  std::uint64_t cache_dropped = 0;
};

nlohmann::json to_json(const DualTelemetry& telemetry);

struct DualResult {
  std::vector<SourceMask> valid_retention;
  std::vector<SourceMask> valid_omission;
  std::vector<SourceMask> minimal_retention;
  std::vector<SourceMask> minimal_omission;
  DualTelemetry telemetry;
  std::vector<LevelTrace> trace;  // pruned = invalid under both types
};

// Throws MineAborted on any inference or evaluation failure.
DualResult mine_dual(const InputSet& input_set,
                     const OutputPredicate& retention_predicate,
                     const OutputPredicate& omission_predicate,
                     ModelClient& client, const DualOptions& options = {});

}  // namespace ragrules
