#pragma once

// Brute-force ground truth straight from the rule definitions. Not a
// production path: every node of the lattice is evaluated.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragrules/lattice.hpp"
#include "ragrules/model.hpp"
#include "ragrules/predicate.hpp"

namespace ragrules {

inline constexpr int kOracleMaxSources = 20;

struct OracleResult {
  Interpretation interpretation = Interpretation::kRetention;
  int n = 0;
  std::vector<SourceMask> valid;  // ascending
  std::uint64_t evaluations = 0;  // always 2^n
  // Indexed by mask bits: did O hold for this node's concrete input?
  std::vector<std::uint8_t> satisfied;
};

// Per-node satisfaction cache shared across oracle queries within one run,
// so repeated verify_rule calls cost one judgment per node. With stochastic
// clients each node is sampled exactly once.
class Oracle {
 public:
  // Throws RefusalError if the input set exceeds kOracleMaxSources.
  Oracle(const InputSet& input_set, const OutputPredicate& predicate,
         ModelClient& client);

  // O(M(concrete_input(node))) for the given interpretation.
  bool satisfied(const SourceMask& node, Interpretation interpretation);

  // Retention: every superset of `mask` satisfies O. Omission: every
  // retained set disjoint from `mask` satisfies O.
  bool verify_rule(const SourceMask& mask, Interpretation interpretation);

  // Evaluates all 2^n nodes, then propagates validity downward: a node is
  // valid iff it is satisfied and all of its parents are valid.
  OracleResult brute_force_valid(Interpretation interpretation);

  std::uint64_t judgments() const { return judgments_; }

 private:
  const InputSet& input_set_;
  const OutputPredicate& predicate_;
  ModelClient& client_;
  // Keyed by the concrete retained mask, shared by both interpretations.
  std::unordered_map<std::uint64_t, bool> cache_;
  std::uint64_t judgments_ = 0;
};

bool verify_rule(const SourceMask& mask, Interpretation interpretation,
                 const InputSet& input_set, const OutputPredicate& predicate,
                 ModelClient& client);

OracleResult brute_force_valid(Interpretation interpretation,
                               const InputSet& input_set,
                               const OutputPredicate& predicate,
                               ModelClient& client);

// Downward propagation over a satisfaction table indexed by mask bits.
std::vector<SourceMask> propagate_validity(int n,
                                           const std::vector<std::uint8_t>& satisfied);

// {"<mask integer>": 0|1, ...}; reusable as a validity-assignment fixture.
nlohmann::json satisfaction_to_json(const OracleResult& result);

}  // namespace ragrules
