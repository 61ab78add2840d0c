#include "ragrules/miner_mono.hpp"

#include <algorithm>
#include <atomic>
#include <iterator>

#include "level_runner.hpp"

namespace ragrules {

namespace detail {

std::vector<SourceMask> children_of(const std::vector<SourceMask>& frontier) {
  std::vector<SourceMask> out;
  for (const auto& mask : frontier) {
    const auto kids = children(mask);
    out.insert(out.end(), kids.begin(), kids.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool contains(const std::vector<SourceMask>& sorted, const SourceMask& mask) {
  return std::binary_search(sorted.begin(), sorted.end(), mask);
}

}  // namespace detail

MonoResult mine_mono(const InputSet& input_set, const OutputPredicate& predicate,
                     ModelClient& client, Interpretation interpretation,
                     const MineOptions& options) {
  const int n = input_set.size();
  MonoResult result;
  result.interpretation = interpretation;
  result.telemetry = MineTelemetry(n);
  MineTelemetry& telemetry = result.telemetry;

  std::atomic<std::uint64_t> calls{0};
  std::vector<SourceMask> invalid;  // Z, ascending

  for (int level = n; level >= 0; --level) {
    std::vector<SourceMask> pruned = detail::children_of(invalid);
    std::vector<SourceMask> queue;
    for (const auto& node : enumerate_level(n, level)) {
      if (!detail::contains(pruned, node)) queue.push_back(node);
    }

    struct Verdict {
      bool satisfied = false;
    };
    auto outcome = detail::run_level<Verdict>(
        queue, options.parallelism, [&](const SourceMask& node) {
          const ModelInput input =
              make_model_input(concrete_mask(node, interpretation), input_set);
          ++calls;
          const std::string output = client.infer(input);
          return Verdict{predicate.evaluate(output)};
        });

    telemetry.model_calls = calls.load();
    telemetry.evaluated_per_level[level] = queue.size();
    telemetry.pruned_per_level[level] = pruned.size();
    telemetry.last_level = level;
    if (outcome.error) {
      try {
        std::rethrow_exception(outcome.error);
      } catch (const std::exception& e) {
        throw MineAborted(queue[outcome.failed_at], e.what(), telemetry);
      }
    }

    std::vector<SourceMask> failed;
    std::size_t added = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      if (outcome.results[i].satisfied) {
        result.valid.push_back(queue[i]);
        ++added;
      } else {
        failed.push_back(queue[i]);
      }
    }
    if (options.record_trace) {
      result.trace.push_back({level, queue, pruned});
    }

    invalid.clear();
    std::merge(pruned.begin(), pruned.end(), failed.begin(), failed.end(),
               std::back_inserter(invalid));

    if (added == 0) {
      if (level > 0) telemetry.early_terminated_at = level;
      break;
    }
  }

  std::sort(result.valid.begin(), result.valid.end());
  result.minimal = minimal_rules(result.valid);
  return result;
}

}  // namespace ragrules
