#pragma once

// Run configuration: a JSON document naming the input set, the model, the
// predicate(s) and run options. Only "api_key" fields undergo ${VAR}
// environment interpolation.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ragrules/chat.hpp"
#include "ragrules/lattice.hpp"
#include "ragrules/model.hpp"
#include "ragrules/predicate.hpp"

namespace ragrules {

enum class Mode { kMono, kDual, kVerify, kOracle, kSweep, kHotpotCurves };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct HotpotSettings {
  std::filesystem::path path;
  std::size_t supporting_facts = 3;
  std::size_t limit = 120;  // 0 = all
  int k_min = 0;
  int k_max = 6;
  std::filesystem::path output_dir = "hotpot-curves";
};

struct RunConfig {
  Mode mode = Mode::kMono;
  std::optional<Interpretation> interpretation;
  nlohmann::json input;       // {question, instructions, sources}
  nlohmann::json model;       // model block
  nlohmann::json predicate;   // single predicate (mono, verify, oracle)
  nlohmann::json predicates;  // {retention, omission} or {correct, incorrect}
  nlohmann::json judge;       // chat block used by judge_fallback predicates
  bool cache = true;
  std::size_t cache_max_bytes = 0;
  int parallelism = 1;
  std::int64_t seed = 0;
  std::optional<std::string> output;
  std::optional<std::uint64_t> mask;  // verify
  int sweep_n = 4;
  std::optional<HotpotSettings> hotpot;

  std::filesystem::path base_dir;  // relative paths resolve against this
  std::string digest;              // SHA-256 of the file before interpolation
};

// Parses a config document. Throws ConfigError on unknown keys' types,
// missing environment variables, or malformed blocks.
RunConfig parse_config(const nlohmann::json& document,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Enforces per-mode requirements: mono/verify/oracle need exactly one
// predicate and an interpretation, dual needs two predicates, sweep needs
// n <= 4, hotpot-curves needs a hotpot block. Throws ConfigError.
void validate(const RunConfig& config);

// Replaces ${NAME} in `text` with the environment variable's value.
std::string interpolate_env(std::string_view text);

InputSet make_input_set(const nlohmann::json& block);

// model/temperature/seed of an openai or replay block. A missing "seed"
// falls back to default_seed; an explicit null sends none.
ChatSettings make_chat_settings(const nlohmann::json& block,
                                std::int64_t default_seed = 0);

std::shared_ptr<ChatClient> make_chat_client(const nlohmann::json& block,
                                             const std::filesystem::path& base_dir,
                                             std::int64_t default_seed = 0);

// Builds M for an input set of the given width.
std::shared_ptr<ModelClient> make_model(const nlohmann::json& block, int width,
                                        const std::filesystem::path& base_dir,
                                        std::int64_t default_seed = 0);

struct PredicateContext {
  std::optional<std::string> ground_truth;  // fills target/ground_truth
  std::shared_ptr<ChatClient> judge;
};

// Kinds: target_match, regex, judge_fallback, scripted, token. "negate": true
// inverts the verdict.
std::shared_ptr<const OutputPredicate> make_predicate(
    const nlohmann::json& block, const PredicateContext& context = {});

// The human-readable consequent for reports ("description" field).
std::string predicate_description(const nlohmann::json& block);

}  // namespace ragrules
