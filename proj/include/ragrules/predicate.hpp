#pragma once

// Output predicates O: Y -> {0,1}.
//
// evaluate() always returns a verdict or throws EvaluationError; a failure to
// judge is never reported as 0, since a fabricated 0 would prune valid
// subtrees during mining.

#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>

#include "ragrules/chat.hpp"

namespace ragrules {

enum class PredicateKind { kTargetMatch, kRegex, kJudgeFallback, kScripted };

std::string_view to_string(PredicateKind kind);

// Case-folds ASCII, trims, and collapses whitespace runs to one space.
std::string normalize_text(std::string_view text);

class OutputPredicate {
 public:
  virtual ~OutputPredicate() = default;
  virtual bool evaluate(std::string_view output) const = 0;
  virtual PredicateKind kind() const = 0;
  // False when verdicts may vary across calls (LLM judges).
  virtual bool deterministic() const { return true; }
};

// 1 iff the normalized target occurs in the normalized output.
class TargetMatchPredicate final : public OutputPredicate {
 public:
  // Throws ConfigError on an empty (post-normalization) target.
  explicit TargetMatchPredicate(std::string_view target);
  bool evaluate(std::string_view output) const override;
  PredicateKind kind() const override { return PredicateKind::kTargetMatch; }
  const std::string& target() const { return target_; }

 private:
  std::string target_;
};

class RegexPredicate final : public OutputPredicate {
 public:
  // ECMAScript syntax, searched anywhere in the output. Throws ConfigError on
  // a malformed pattern.
  explicit RegexPredicate(const std::string& pattern, bool ignore_case = true);
  bool evaluate(std::string_view output) const override;
  PredicateKind kind() const override { return PredicateKind::kRegex; }

 private:
  std::regex regex_;
};

// Exact-output table lookup; outputs not in the table map to the default.
class ScriptedPredicate final : public OutputPredicate {
 public:
  explicit ScriptedPredicate(std::map<std::string, bool> table,
                             bool default_verdict = false);
  bool evaluate(std::string_view output) const override;
  PredicateKind kind() const override { return PredicateKind::kScripted; }

 private:
  std::map<std::string, bool, std::less<>> table_;
  bool default_verdict_;
};

// The token predicate used with validity-assignment models: 1 iff output is
// exactly "1".
std::shared_ptr<const OutputPredicate> token_predicate();

inline constexpr std::string_view kDefaultJudgeTemplate =
    "You are grading an answer to a question.\n"
    "Ground truth answer: {ground_truth}\n"
    "Candidate response: {output}\n"
    "Does the candidate response state an answer equivalent to the ground "
    "truth answer? Reply with a single digit: 1 if yes, 0 if no.";

// Replaces {output} and {ground_truth} in one left-to-right pass, so text
// substituted for one placeholder is never re-scanned.
std::string render_judge_prompt(std::string_view prompt_template,
                                std::string_view output,
                                std::string_view ground_truth);

// Parses a judge reply. Only "0" or "1" (surrounding whitespace allowed) is
// accepted; anything else throws EvaluationError.
bool parse_judge_verdict(std::string_view reply);

struct JudgeOptions {
  std::string prompt_template = std::string(kDefaultJudgeTemplate);
  std::optional<std::string> pattern;  // optional regex tier before the judge
};

// Normalized match against the ground truth, then the optional regex, then
// the judge. The judge is only consulted when both fast tiers return 0.
// Transport failures and unparseable replies throw EvaluationError.
bool evaluate_with_judge(std::string_view output, std::string_view ground_truth,
                         ChatClient& judge, const JudgeOptions& options = {});

class JudgeFallbackPredicate final : public OutputPredicate {
 public:
  JudgeFallbackPredicate(std::string ground_truth,
                         std::shared_ptr<ChatClient> judge,
                         JudgeOptions options = {});
  bool evaluate(std::string_view output) const override;
  PredicateKind kind() const override { return PredicateKind::kJudgeFallback; }
  bool deterministic() const override { return false; }
  const std::string& ground_truth() const { return ground_truth_; }

 private:
  std::string ground_truth_;
  std::shared_ptr<ChatClient> judge_;
  JudgeOptions options_;
};

// Inverts another predicate's verdict; errors pass through untouched.
class NegatedPredicate final : public OutputPredicate {
 public:
  explicit NegatedPredicate(std::shared_ptr<const OutputPredicate> inner);
  bool evaluate(std::string_view output) const override;
  PredicateKind kind() const override { return inner_->kind(); }
  bool deterministic() const override { return inner_->deterministic(); }

 private:
  std::shared_ptr<const OutputPredicate> inner_;
};

struct PredicatePair {
  std::shared_ptr<const OutputPredicate> retention;
  std::shared_ptr<const OutputPredicate> omission;
};

}  // namespace ragrules
