#include <algorithm>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "ragrules/bench.hpp"
#include "ragrules/errors.hpp"
#include "ragrules/miner_mono.hpp"
#include "ragrules/oracle.hpp"

namespace ragrules {

namespace {

struct Accumulator {
  std::uint64_t count = 0;
  std::uint64_t visited_sum = 0;
  std::uint64_t min_visited = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max_visited = 0;

  void add(std::uint64_t visited) {
    ++count;
    visited_sum += visited;
    min_visited = std::min(min_visited, visited);
    max_visited = std::max(max_visited, visited);
  }
  void merge(const Accumulator& other) {
    count += other.count;
    visited_sum += other.visited_sum;
    min_visited = std::min(min_visited, other.min_visited);
    max_visited = std::max(max_visited, other.max_visited);
  }
};

struct Partial {
  std::map<int, Accumulator> groups;
  std::uint64_t mismatches = 0;
};

Partial sweep_range(int n, std::uint64_t begin, std::uint64_t end) {
  Partial partial;
  const InputSet input =
      InputSet::from_texts(std::vector<std::string>(n, std::string()), {});
  const auto predicate = token_predicate();
  const std::uint64_t nodes = std::uint64_t{1} << n;
  std::vector<std::uint8_t> satisfied(nodes);
  for (std::uint64_t packed = begin; packed < end; ++packed) {
    auto model = ValidityAssignmentModel::from_packed(n, packed);
    const auto mined =
        mine_mono(input, *predicate, model, Interpretation::kRetention);
    for (std::uint64_t m = 0; m < nodes; ++m) satisfied[m] = (packed >> m) & 1U;
    const auto valid = propagate_validity(n, satisfied);
    if (valid != mined.valid) ++partial.mismatches;
    partial.groups[static_cast<int>(valid.size())].add(
        mined.telemetry.model_calls);
  }
  return partial;
}

}  // namespace

SweepResult synth_sweep(int n, int parallelism) {
  if (n < 0 || n > kSweepMaxSources) {
    throw RefusalError("synthetic sweep is limited to n <= 4 (2^(2^n) runs)");
  }
  const std::uint64_t total = std::uint64_t{1} << (std::uint64_t{1} << n);
  const auto workers = static_cast<std::uint64_t>(
      std::clamp<std::uint64_t>(parallelism, 1, total));

  std::vector<Partial> partials(workers);
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = total * w / workers;
      const std::uint64_t end = total * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] { partials[w] = sweep_range(n, begin, end); });
    }
  }

  Partial merged;
  for (const auto& partial : partials) {
    merged.mismatches += partial.mismatches;
    for (const auto& [count, acc] : partial.groups) merged.groups[count].merge(acc);
  }

  SweepResult result;
  result.n = n;
  result.assignments = total;
  result.oracle_mismatches = merged.mismatches;
  for (const auto& [count, acc] : merged.groups) {
    result.rows.push_back({count,
                           static_cast<double>(acc.visited_sum) /
                               static_cast<double>(acc.count),
                           acc.min_visited, acc.max_visited, acc.count});
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "valid_rule_count,mean_visited,min_visited,max_visited,assignment_count\n";
  for (const auto& row : sweep.rows) {
    out << row.valid_rule_count << ',' << row.mean_visited << ','
        << row.min_visited << ',' << row.max_visited << ','
        << row.assignment_count << '\n';
  }
}

nlohmann::json to_json(const SweepResult& sweep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : sweep.rows) {
    rows.push_back({{"valid_rule_count", row.valid_rule_count},
                    {"mean_visited", row.mean_visited},
                    {"min_visited", row.min_visited},
                    {"max_visited", row.max_visited},
                    {"assignment_count", row.assignment_count}});
  }
  return {{"n", sweep.n},
          {"assignments", sweep.assignments},
          {"oracle_mismatches", sweep.oracle_mismatches},
          {"rows", rows}};
}

}  // namespace ragrules
