#include "ragrules/miner_dual.hpp"

#include <algorithm>
#include <atomic>
#include <iterator>

#include "level_runner.hpp"

namespace ragrules {

ResponseCache::Lookup ResponseCache::get_or_compute(
    std::uint64_t key, const std::function<std::string()>& compute) {
  std::promise<std::string> promise;
  std::shared_future<std::string> pending;
  {
    std::lock_guard lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) {
      pending = it->second;
    } else {
      entries_.emplace(key, promise.get_future().share());
    }
  }
  if (pending.valid()) return {pending.get(), true};

  std::string output;
  try {
    output = compute();
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mutex_);
    entries_.erase(key);
    throw;
  }
  promise.set_value(output);
  std::lock_guard lock(mutex_);
  if (max_bytes_ != 0 && bytes_ + output.size() > max_bytes_) {
    entries_.erase(key);
    ++dropped_;
  } else {
    bytes_ += output.size();
  }
  return {std::move(output), false};
}

std::size_t ResponseCache::entries() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t ResponseCache::bytes() const {
  std::lock_guard lock(mutex_);
  return bytes_;
}

std::uint64_t ResponseCache::dropped() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

nlohmann::json to_json(const DualTelemetry& telemetry) {
  auto optional_level = [](const std::optional<int>& level) {
    return level ? nlohmann::json(*level) : nlohmann::json(nullptr);
  };
  return {
      {"combined", to_json(telemetry.combined)},
      {"retention_evaluations", telemetry.retention_evaluations},
      {"omission_evaluations", telemetry.omission_evaluations},
      {"retention_exhausted_at", optional_level(telemetry.retention_exhausted_at)},
      {"omission_exhausted_at", optional_level(telemetry.omission_exhausted_at)},
      {"cache",
       {{"enabled", telemetry.cache_enabled},
        {"entries", telemetry.cache_entries},
        {"bytes", telemetry.cache_bytes},
        {"dropped", telemetry.cache_dropped},
        {"hits", telemetry.combined.cache_hits}}},
  };
}

DualResult mine_dual(const InputSet& input_set,
                     const OutputPredicate& retention_predicate,
                     const OutputPredicate& omission_predicate,
                     ModelClient& client, const DualOptions& options) {
  const int n = input_set.size();
  DualResult result;
  DualTelemetry& telemetry = result.telemetry;
  telemetry.combined = MineTelemetry(n);
  telemetry.cache_enabled = options.cache_enabled;

  ResponseCache cache(options.cache_max_bytes);
  std::atomic<std::uint64_t> calls{0};
  std::atomic<std::uint64_t> hits{0};
  std::atomic<std::uint64_t> retention_evaluations{0};
  std::atomic<std::uint64_t> omission_evaluations{0};

  auto respond = [&](const SourceMask& retained) -> std::string {
    auto call = [&] {
      ++calls;
      return client.infer(make_model_input(retained, input_set));
    };
    if (!options.cache_enabled) return call();
    auto lookup = cache.get_or_compute(retained.bits(), call);
    if (lookup.hit) ++hits;
    return std::move(lookup.output);
  };

  auto sync_telemetry = [&] {
    telemetry.combined.model_calls = calls.load();
    telemetry.combined.cache_hits = hits.load();
    telemetry.retention_evaluations = retention_evaluations.load();
    telemetry.omission_evaluations = omission_evaluations.load();
    telemetry.cache_entries = cache.entries();
    telemetry.cache_bytes = cache.bytes();
    telemetry.cache_dropped = cache.dropped();
  };

  std::vector<SourceMask> invalid_retention;  // Z_ret, ascending
  std::vector<SourceMask> invalid_omission;   // Z_omi, ascending

  for (int level = n; level >= 0; --level) {
    const auto blocked_retention = detail::children_of(invalid_retention);
    const auto blocked_omission = detail::children_of(invalid_omission);

    std::vector<SourceMask> queue;
    std::vector<SourceMask> pruned;
    for (const auto& node : enumerate_level(n, level)) {
      if (detail::contains(blocked_retention, node) &&
          detail::contains(blocked_omission, node)) {
        pruned.push_back(node);
      } else {
        queue.push_back(node);
      }
    }

    struct Verdict {
      bool retention = false;
      bool omission = false;
    };
    auto outcome = detail::run_level<Verdict>(
        queue, options.parallelism, [&](const SourceMask& node) {
          Verdict verdict;
          if (!detail::contains(blocked_retention, node)) {
            ++retention_evaluations;
            verdict.retention = retention_predicate.evaluate(
                respond(concrete_mask(node, Interpretation::kRetention)));
          }
          if (!detail::contains(blocked_omission, node)) {
            ++omission_evaluations;
            verdict.omission = omission_predicate.evaluate(
                respond(concrete_mask(node, Interpretation::kOmission)));
          }
          return verdict;
        });

    telemetry.combined.evaluated_per_level[level] = queue.size();
    telemetry.combined.pruned_per_level[level] = pruned.size();
    telemetry.combined.last_level = level;
    sync_telemetry();
    if (outcome.error) {
      try {
        std::rethrow_exception(outcome.error);
      } catch (const std::exception& e) {
        throw MineAborted(queue[outcome.failed_at], e.what(),
                          telemetry.combined);
      }
    }

    // A node not passing a type joins that type's frontier, whether it
    // failed the predicate or was never asked because a parent was invalid.
    std::vector<SourceMask> failed_retention;
    std::vector<SourceMask> failed_omission;
    std::size_t added_retention = 0;
    std::size_t added_omission = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const auto& verdict = outcome.results[i];
      if (verdict.retention) {
        result.valid_retention.push_back(queue[i]);
        ++added_retention;
      } else {
        failed_retention.push_back(queue[i]);
      }
      if (verdict.omission) {
        result.valid_omission.push_back(queue[i]);
        ++added_omission;
      } else {
        failed_omission.push_back(queue[i]);
      }
    }
    if (options.record_trace) {
      result.trace.push_back({level, queue, pruned});
    }

    auto advance = [](const std::vector<SourceMask>& blocked,
                      const std::vector<SourceMask>& failed) {
      std::vector<SourceMask> next;
      std::set_union(blocked.begin(), blocked.end(), failed.begin(),
                     failed.end(), std::back_inserter(next));
      return next;
    };
    invalid_retention = advance(blocked_retention, failed_retention);
    invalid_omission = advance(blocked_omission, failed_omission);

    if (added_retention == 0 && !telemetry.retention_exhausted_at) {
      telemetry.retention_exhausted_at = level;
    }
    if (added_omission == 0 && !telemetry.omission_exhausted_at) {
      telemetry.omission_exhausted_at = level;
    }
    if (added_retention == 0 && added_omission == 0) {
      if (level > 0) telemetry.combined.early_terminated_at = level;
      break;
    }
  }

  sync_telemetry();
  std::sort(result.valid_retention.begin(), result.valid_retention.end());
  std::sort(result.valid_omission.begin(), result.valid_omission.end());
  result.minimal_retention = minimal_rules(result.valid_retention);
  result.minimal_omission = minimal_rules(result.valid_omission);
  return result;
}

}  // namespace ragrules
