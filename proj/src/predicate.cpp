#include "ragrules/predicate.hpp"

#include <cctype>

#include "ragrules/errors.hpp"

namespace ragrules {

std::string_view to_string(PredicateKind kind) {
  switch (kind) {
    case PredicateKind::kTargetMatch:
      return "target_match";
    case PredicateKind::kRegex:
      return "regex";
    case PredicateKind::kJudgeFallback:
      return "judge_fallback";
    case PredicateKind::kScripted:
      return "scripted";
  }
  return "unknown";
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

TargetMatchPredicate::TargetMatchPredicate(std::string_view target)
    : target_(normalize_text(target)) {
  if (target_.empty()) {
    throw ConfigError("target_match predicate needs a non-empty target");
  }
}

bool TargetMatchPredicate::evaluate(std::string_view output) const {
  return normalize_text(output).find(target_) != std::string::npos;
}

RegexPredicate::RegexPredicate(const std::string& pattern, bool ignore_case) {
  auto flags = std::regex::ECMAScript;
  if (ignore_case) flags |= std::regex::icase;
  try {
    regex_ = std::regex(pattern, flags);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid regex '" + pattern + "': " + e.what());
  }
}

bool RegexPredicate::evaluate(std::string_view output) const {
  return std::regex_search(output.begin(), output.end(), regex_);
}

ScriptedPredicate::ScriptedPredicate(std::map<std::string, bool> table,
                                     bool default_verdict)
    : table_(table.begin(), table.end()), default_verdict_(default_verdict) {}

bool ScriptedPredicate::evaluate(std::string_view output) const {
  const auto it = table_.find(output);
  return it == table_.end() ? default_verdict_ : it->second;
}

std::shared_ptr<const OutputPredicate> token_predicate() {
  static const auto kToken = std::make_shared<const ScriptedPredicate>(
      std::map<std::string, bool>{{"1", true}, {"0", false}});
  return kToken;
}

std::string render_judge_prompt(std::string_view prompt_template,
                                std::string_view output,
                                std::string_view ground_truth) {
  static constexpr std::string_view kOutput = "{output}";
  static constexpr std::string_view kTruth = "{ground_truth}";
  std::string out;
  out.reserve(prompt_template.size() + output.size() + ground_truth.size());
  std::size_t i = 0;
  while (i < prompt_template.size()) {
    const auto rest = prompt_template.substr(i);
    if (rest.starts_with(kOutput)) {
      out += output;
      i += kOutput.size();
    } else if (rest.starts_with(kTruth)) {
      out += ground_truth;
      i += kTruth.size();
    } else {
      out += prompt_template[i++];
    }
  }
  return out;
}

bool parse_judge_verdict(std::string_view reply) {
  const std::string trimmed = normalize_text(reply);
  if (trimmed == "1") return true;
  if (trimmed == "0") return false;
  throw EvaluationError("judge reply is not a single 0/1 digit: '" +
                        std::string(reply.substr(0, 80)) + "'");
}

bool evaluate_with_judge(std::string_view output, std::string_view ground_truth,
                         ChatClient& judge, const JudgeOptions& options) {
  const std::string truth = normalize_text(ground_truth);
  if (!truth.empty() &&
      normalize_text(output).find(truth) != std::string::npos) {
    return true;
  }
  if (options.pattern &&
      RegexPredicate(*options.pattern).evaluate(output)) {
    return true;
  }
  ChatRequest request;
  request.system =
      "You are a careful grader. Answer with a single digit and nothing else.";
  request.user = render_judge_prompt(options.prompt_template, output,
                                     ground_truth);
  std::string reply;
  try {
    reply = judge.complete(request);
  } catch (const InferenceError& e) {
    throw EvaluationError(std::string("judge call failed: ") + e.what());
  }
  return parse_judge_verdict(reply);
}

JudgeFallbackPredicate::JudgeFallbackPredicate(
    std::string ground_truth, std::shared_ptr<ChatClient> judge,
    JudgeOptions options)
    : ground_truth_(std::move(ground_truth)),
      judge_(std::move(judge)),
      options_(std::move(options)) {
  if (!judge_) throw ConfigError("judge_fallback predicate needs a judge");
  if (options_.pattern) RegexPredicate check(*options_.pattern);
}

bool JudgeFallbackPredicate::evaluate(std::string_view output) const {
  return evaluate_with_judge(output, ground_truth_, *judge_, options_);
}

NegatedPredicate::NegatedPredicate(std::shared_ptr<const OutputPredicate> inner)
    : inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("negated predicate needs an inner predicate");
}

bool NegatedPredicate::evaluate(std::string_view output) const {
  return !inner_->evaluate(output);
}

}  // namespace ragrules
