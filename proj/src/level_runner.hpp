#pragma once

// Evaluates the surviving nodes of one lattice level, optionally on several
// threads. Results land at the node's position, so merging them in order
// reproduces the sequential run.

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "ragrules/lattice.hpp"

namespace ragrules::detail {

template <class Result>
struct LevelOutcome {
  std::vector<Result> results;
  // Lowest failing position, if any, and its exception.
  std::size_t failed_at = static_cast<std::size_t>(-1);
  std::exception_ptr error;
};

template <class Result, class Fn>
LevelOutcome<Result> run_level(const std::vector<SourceMask>& nodes,
                               int parallelism, Fn&& evaluate) {
  LevelOutcome<Result> outcome;
  outcome.results.resize(nodes.size());
  std::vector<std::exception_ptr> errors(nodes.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{nodes.size()};

  auto worker = [&] {
    for (std::size_t i = next++; i < nodes.size(); i = next++) {
      if (i > first_failure.load()) break;
      try {
        outcome.results[i] = evaluate(nodes[i]);
      } catch (...) {
        errors[i] = std::current_exception();
        std::size_t seen = first_failure.load();
        while (i < seen && !first_failure.compare_exchange_weak(seen, i)) {
        }
      }
    }
  };

  const auto threads = static_cast<std::size_t>(std::max(parallelism, 1));
  if (threads == 1 || nodes.size() < 2) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    const std::size_t count = std::min(threads, nodes.size());
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (errors[i]) {
      outcome.failed_at = i;
      outcome.error = errors[i];
      break;
    }
  }
  return outcome;
}

// All size-(l) children of `frontier` (each of size l+1), ascending, unique.
std::vector<SourceMask> children_of(const std::vector<SourceMask>& frontier);

// Sorted-range membership.
bool contains(const std::vector<SourceMask>& sorted, const SourceMask& mask);

}  // namespace ragrules::detail
