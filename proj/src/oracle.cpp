#include "ragrules/oracle.hpp"

#include "ragrules/errors.hpp"

namespace ragrules {

Oracle::Oracle(const InputSet& input_set, const OutputPredicate& predicate,
               ModelClient& client)
    : input_set_(input_set), predicate_(predicate), client_(client) {
  if (input_set.size() > kOracleMaxSources) {
    throw RefusalError("oracle enumeration refused for " +
                       std::to_string(input_set.size()) + " sources (limit " +
                       std::to_string(kOracleMaxSources) + ")");
  }
}

bool Oracle::satisfied(const SourceMask& node, Interpretation interpretation) {
  const SourceMask retained = concrete_mask(node, interpretation);
  if (const auto it = cache_.find(retained.bits()); it != cache_.end()) {
    return it->second;
  }
  ++judgments_;
  const bool verdict =
      predicate_.evaluate(client_.infer(make_model_input(retained, input_set_)));
  cache_.emplace(retained.bits(), verdict);
  return verdict;
}

bool Oracle::verify_rule(const SourceMask& mask, Interpretation interpretation) {
  if (mask.width() != input_set_.size()) {
    throw std::invalid_argument("mask width does not match the input set");
  }
  // Both definitions quantify over node masks t with mask ⊆ t: supersets of
  // the retained set, or omitted sets that include the omitted mask.
  const std::uint64_t free = mask.complement().bits();
  std::uint64_t extra = free;
  while (true) {
    if (!satisfied(SourceMask(mask.bits() | extra, mask.width()),
                   interpretation)) {
      return false;
    }
    if (extra == 0) break;
    extra = (extra - 1) & free;
  }
  return true;
}

std::vector<SourceMask> propagate_validity(
    int n, const std::vector<std::uint8_t>& satisfied) {
  const std::uint64_t count = std::uint64_t{1} << n;
  if (n < 0 || n > kOracleMaxSources || satisfied.size() != count) {
    throw std::invalid_argument("satisfaction table must hold 2^n entries");
  }
  std::vector<std::uint8_t> valid(count, 0);
  // Parents have strictly larger numeric values, so a descending sweep sees
  // every parent before its children.
  for (std::uint64_t m = count; m-- > 0;) {
    bool ok = satisfied[m] != 0;
    for (int bit = 0; ok && bit < n; ++bit) {
      const std::uint64_t parent = m | (std::uint64_t{1} << bit);
      if (parent != m && !valid[parent]) ok = false;
    }
    valid[m] = ok;
  }
  std::vector<SourceMask> out;
  for (std::uint64_t m = 0; m < count; ++m) {
    if (valid[m]) out.emplace_back(m, n);
  }
  return out;
}

OracleResult Oracle::brute_force_valid(Interpretation interpretation) {
  const int n = input_set_.size();
  const std::uint64_t count = std::uint64_t{1} << n;
  OracleResult result;
  result.interpretation = interpretation;
  result.n = n;
  result.satisfied.assign(count, 0);
  for (std::uint64_t m = 0; m < count; ++m) {
    result.satisfied[m] = satisfied(SourceMask(m, n), interpretation);
    ++result.evaluations;
  }
  result.valid = propagate_validity(n, result.satisfied);
  return result;
}

bool verify_rule(const SourceMask& mask, Interpretation interpretation,
                 const InputSet& input_set, const OutputPredicate& predicate,
                 ModelClient& client) {
  Oracle oracle(input_set, predicate, client);
  return oracle.verify_rule(mask, interpretation);
}

OracleResult brute_force_valid(Interpretation interpretation,
                               const InputSet& input_set,
                               const OutputPredicate& predicate,
                               ModelClient& client) {
  Oracle oracle(input_set, predicate, client);
  return oracle.brute_force_valid(interpretation);
}

nlohmann::json satisfaction_to_json(const OracleResult& result) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t m = 0; m < result.satisfied.size(); ++m) {
    out[std::to_string(m)] = static_cast<int>(result.satisfied[m]);
  }
  return out;
}

}  // namespace ragrules
