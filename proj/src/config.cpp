#include "ragrules/config.hpp"

#include <cstdlib>
#include <fstream>

#include "ragrules/digest.hpp"
#include "ragrules/errors.hpp"
#include "ragrules/openai_client.hpp"
#include "ragrules/transcript.hpp"

namespace ragrules {

namespace {

using nlohmann::json;

template <class T>
T get_or(const json& block, const char* key, T fallback) {
  if (!block.is_object() || !block.contains(key) || block[key].is_null()) {
    return fallback;
  }
  try {
    return block[key].get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

std::string require_string(const json& block, const char* key,
                           const char* where) {
  if (!block.is_object() || !block.contains(key) || !block[key].is_string()) {
    throw ConfigError(std::string(where) + " needs a string '" + key + "'");
  }
  return block[key].get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& path) {
  std::filesystem::path p(path);
  return p.is_absolute() || base.empty() ? p : base / p;
}

// Interpolates only api_key values, anywhere in the document.
void interpolate_secrets(json& node) {
  if (node.is_object()) {
    for (auto& [key, value] : node.items()) {
      if (key == "api_key" && value.is_string()) {
        value = interpolate_env(value.get<std::string>());
      } else {
        interpolate_secrets(value);
      }
    }
  } else if (node.is_array()) {
    for (auto& item : node) interpolate_secrets(item);
  }
}

SourceMask mask_from_json(const json& value, int width) {
  if (value.is_number_unsigned() || value.is_number_integer()) {
    return SourceMask(value.get<std::uint64_t>(), width);
  }
  if (value.is_array()) {
    return SourceMask::from_indices(value.get<std::vector<int>>(), width);
  }
  throw ConfigError("a mask must be an integer or a list of 1-based indices");
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kMono:
      return "mine-mono";
    case Mode::kDual:
      return "mine-dual";
    case Mode::kVerify:
      return "verify";
    case Mode::kOracle:
      return "oracle";
    case Mode::kSweep:
      return "sweep";
    case Mode::kHotpotCurves:
      return "hotpot-curves";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "mono" || text == "mine-mono") return Mode::kMono;
  if (text == "dual" || text == "mine-dual") return Mode::kDual;
  if (text == "verify") return Mode::kVerify;
  if (text == "oracle") return Mode::kOracle;
  if (text == "sweep") return Mode::kSweep;
  if (text == "hotpot-curves") return Mode::kHotpotCurves;
  throw ConfigError("unknown mode '" + std::string(text) + "'");
}

std::string interpolate_env(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.substr(i, 2) == "${") {
      const auto close = text.find('}', i + 2);
      if (close == std::string_view::npos) {
        throw ConfigError("unterminated ${ in config value");
      }
      const std::string name(text.substr(i + 2, close - i - 2));
      const char* value = std::getenv(name.c_str());
      if (value == nullptr) {
        throw ConfigError("environment variable " + name + " is not set");
      }
      out += value;
      i = close + 1;
    } else {
      out += text[i++];
    }
  }
  return out;
}

RunConfig parse_config(const json& document,
                       const std::filesystem::path& base_dir) {
  if (!document.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig config;
  config.digest = sha256_hex(document.dump());
  config.base_dir = base_dir;

  json doc = document;
  interpolate_secrets(doc);

  if (doc.contains("mode")) config.mode = parse_mode(doc["mode"].get<std::string>());
  if (doc.contains("interpretation")) {
    try {
      config.interpretation =
          parse_interpretation(doc["interpretation"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  config.input = get_or<json>(doc, "input", json());
  config.model = get_or<json>(doc, "model", json());
  config.predicate = get_or<json>(doc, "predicate", json());
  config.predicates = get_or<json>(doc, "predicates", json());
  config.judge = get_or<json>(doc, "judge", json());
  config.cache = get_or<bool>(doc, "cache", true);
  config.cache_max_bytes = get_or<std::size_t>(doc, "cache_max_bytes", 0);
  config.parallelism = get_or<int>(doc, "parallelism", 1);
  config.seed = get_or<std::int64_t>(doc, "seed", 0);
  if (doc.contains("output") && doc["output"].is_string()) {
    config.output = doc["output"].get<std::string>();
  }
  if (doc.contains("mask")) config.mask = doc["mask"].get<std::uint64_t>();
  config.sweep_n = get_or<int>(doc, "n", 4);
  if (doc.contains("hotpot")) {
    const json& block = doc["hotpot"];
    HotpotSettings hotpot;
    hotpot.path = resolve(base_dir, require_string(block, "path", "hotpot"));
    hotpot.supporting_facts = get_or<std::size_t>(block, "supporting_facts", 3);
    hotpot.limit = get_or<std::size_t>(block, "limit", 120);
    hotpot.k_min = get_or<int>(block, "k_min", 0);
    hotpot.k_max = get_or<int>(block, "k_max", 6);
    hotpot.output_dir = get_or<std::string>(block, "output_dir", "hotpot-curves");
    config.hotpot = hotpot;
  }
  if (config.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json document;
  try {
    in >> document;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(document, path.parent_path());
}

void validate(const RunConfig& config) {
  const bool has_single = !config.predicate.is_null();
  const bool has_pair = !config.predicates.is_null();
  switch (config.mode) {
    case Mode::kMono:
    case Mode::kVerify:
    case Mode::kOracle:
      if (!has_single || has_pair) {
        throw ConfigError(std::string(to_string(config.mode)) +
                          " needs exactly one 'predicate' block");
      }
      if (!config.interpretation) {
        throw ConfigError(std::string(to_string(config.mode)) +
                          " needs an interpretation");
      }
      if (config.mode == Mode::kVerify && !config.mask) {
        throw ConfigError("verify needs a mask");
      }
      break;
    case Mode::kDual:
      if (!has_pair || !config.predicates.contains("retention") ||
          !config.predicates.contains("omission") || has_single) {
        throw ConfigError(
            "mine-dual needs 'predicates' with retention and omission blocks");
      }
      break;
    case Mode::kSweep:
      if (config.sweep_n < 0 || config.sweep_n > 4) {
        throw ConfigError("sweep needs 0 <= n <= 4");
      }
      return;
    case Mode::kHotpotCurves:
      if (!config.hotpot) throw ConfigError("hotpot-curves needs a 'hotpot' block");
      if (!has_pair || !config.predicates.contains("correct") ||
          !config.predicates.contains("incorrect")) {
        throw ConfigError(
            "hotpot-curves needs 'predicates' with correct and incorrect blocks");
      }
      if (config.model.is_null()) throw ConfigError("hotpot-curves needs a model");
      return;
  }
  if (config.input.is_null()) throw ConfigError("missing 'input' block");
  if (config.model.is_null()) throw ConfigError("missing 'model' block");
}

InputSet make_input_set(const json& block) {
  if (!block.is_object() || !block.contains("sources") ||
      !block["sources"].is_array()) {
    throw ConfigError("input block needs a 'sources' array");
  }
  std::vector<Source> sources;
  for (const auto& item : block["sources"]) {
    const std::string fallback = "s" + std::to_string(sources.size() + 1);
    if (item.is_string()) {
      sources.push_back({fallback, item.get<std::string>()});
    } else if (item.is_object()) {
      sources.push_back({get_or<std::string>(item, "label", fallback),
                         require_string(item, "text", "source")});
    } else {
      throw ConfigError("a source must be a string or {label, text}");
    }
  }
  InputContext context{get_or<std::string>(block, "question", ""),
                       get_or<std::string>(block, "instructions", "")};
  try {
    return InputSet(std::move(sources), std::move(context));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ChatSettings make_chat_settings(const json& block, std::int64_t default_seed) {
  ChatSettings settings;
  settings.model = get_or<std::string>(block, "model", settings.model);
  settings.temperature = get_or<double>(block, "temperature", 0.0);
  if (block.contains("seed")) {
    if (!block["seed"].is_null()) settings.seed = block["seed"].get<std::int64_t>();
  } else {
    settings.seed = default_seed;
  }
  return settings;
}

std::shared_ptr<ChatClient> make_chat_client(const json& block,
                                             const std::filesystem::path& base_dir,
                                             std::int64_t default_seed) {
  const std::string kind = require_string(block, "kind", "chat block");
  const ChatSettings settings = make_chat_settings(block, default_seed);
  std::shared_ptr<ChatClient> client;
  if (kind == "openai") {
    OpenAiConfig config;
    config.endpoint = get_or<std::string>(block, "endpoint", config.endpoint);
    config.api_key = get_or<std::string>(block, "api_key", "");
    config.settings = settings;
    config.timeout = std::chrono::seconds(get_or<int>(block, "timeout_s", 60));
    config.retry.max_retries = get_or<int>(block, "max_retries", 4);
    config.retry.initial_backoff =
        std::chrono::milliseconds(get_or<int>(block, "initial_backoff_ms", 500));
    config.retry.max_backoff =
        std::chrono::milliseconds(get_or<int>(block, "max_backoff_ms", 20000));
    config.max_in_flight = get_or<int>(block, "max_in_flight", 4);
    client = std::make_shared<OpenAiChatClient>(std::move(config));
    if (block.contains("record_transcript")) {
      const auto path =
          resolve(base_dir, block["record_transcript"].get<std::string>());
      auto store = std::filesystem::exists(path)
                       ? std::make_shared<TranscriptStore>(TranscriptStore::load(path))
                       : std::make_shared<TranscriptStore>();
      client = std::make_shared<RecordingChatClient>(client, settings, store, path);
    }
  } else if (kind == "replay") {
    const auto path =
        resolve(base_dir, require_string(block, "transcript", "replay block"));
    auto store = std::make_shared<const TranscriptStore>(TranscriptStore::load(path));
    client = std::make_shared<ReplayChatClient>(store, settings);
  } else {
    throw ConfigError("unknown chat kind '" + kind + "' (openai or replay)");
  }
  return client;
}

std::shared_ptr<ModelClient> make_model(const json& block, int width,
                                        const std::filesystem::path& base_dir,
                                        std::int64_t default_seed) {
  const std::string kind = require_string(block, "kind", "model block");
  if (kind == "scripted") {
    std::unordered_map<std::uint64_t, std::string> exact;
    for (const auto& entry : get_or<json>(block, "outputs", json::array())) {
      exact[mask_from_json(entry.at("retained"), width).bits()] =
          entry.at("output").get<std::string>();
    }
    struct Clause {
      SourceMask required;
      std::string output;
    };
    std::vector<Clause> clauses;
    for (const auto& entry : get_or<json>(block, "when_retained", json::array())) {
      clauses.push_back({mask_from_json(entry.at("all_of"), width),
                         entry.at("output").get<std::string>()});
    }
    const std::optional<std::string> fallback =
        block.contains("default_output")
            ? std::optional<std::string>(block["default_output"].get<std::string>())
            : std::nullopt;
    if (clauses.empty() && !fallback) {
      return std::make_shared<ScriptedModel>(width, std::move(exact));
    }
    // Exact entries win, then the first matching clause, then the default.
    auto script = [&](const SourceMask& retained) -> std::string {
      if (const auto it = exact.find(retained.bits()); it != exact.end()) {
        return it->second;
      }
      for (const auto& clause : clauses) {
        if (clause.required.is_subset_of(retained)) return clause.output;
      }
      if (fallback) return *fallback;
      throw ConfigError("scripted model has no output for retained set " +
                        to_string(retained));
    };
    std::unordered_map<std::uint64_t, std::string> table;
    const std::uint64_t count = std::uint64_t{1} << width;
    if (width > 20) throw ConfigError("scripted models are limited to 20 sources");
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      try {
        table.emplace(bits, script(SourceMask(bits, width)));
      } catch (const ConfigError&) {
        // Leave the hole; infer() reports the miss if it is ever queried.
      }
    }
    return std::make_shared<ScriptedModel>(width, std::move(table));
  }
  if (kind == "validity_assignment") {
    std::vector<SourceMask> satisfied;
    for (const auto& entry : get_or<json>(block, "satisfied", json::array())) {
      satisfied.push_back(mask_from_json(entry, width));
    }
    return std::make_shared<ValidityAssignmentModel>(width, std::move(satisfied));
  }
  if (kind == "openai" || kind == "replay") {
    return std::make_shared<RagModel>(make_chat_client(block, base_dir, default_seed));
  }
  throw ConfigError("unknown model kind '" + kind + "'");
}

std::shared_ptr<const OutputPredicate> make_predicate(
    const json& block, const PredicateContext& context) {
  const std::string kind = require_string(block, "kind", "predicate block");
  std::shared_ptr<const OutputPredicate> predicate;
  if (kind == "target_match") {
    std::string target = get_or<std::string>(block, "target", "");
    if (target.empty() && context.ground_truth) target = *context.ground_truth;
    predicate = std::make_shared<TargetMatchPredicate>(target);
  } else if (kind == "regex") {
    predicate = std::make_shared<RegexPredicate>(
        require_string(block, "pattern", "regex predicate"),
        get_or<bool>(block, "ignore_case", true));
  } else if (kind == "scripted") {
    std::map<std::string, bool> table;
    const json entries = get_or<json>(block, "table", json::object());
    for (const auto& [output, verdict] : entries.items()) {
      table[output] = verdict.is_boolean() ? verdict.get<bool>()
                                           : verdict.get<int>() != 0;
    }
    predicate = std::make_shared<ScriptedPredicate>(
        std::move(table), get_or<bool>(block, "default", false));
  } else if (kind == "token") {
    predicate = token_predicate();
  } else if (kind == "judge_fallback") {
    std::string truth = get_or<std::string>(block, "ground_truth", "");
    if (truth.empty() && context.ground_truth) truth = *context.ground_truth;
    if (truth.empty()) throw ConfigError("judge_fallback needs a ground_truth");
    if (!context.judge) throw ConfigError("judge_fallback needs a 'judge' block");
    JudgeOptions options;
    options.prompt_template = get_or<std::string>(
        block, "judge_prompt", std::string(kDefaultJudgeTemplate));
    if (block.contains("pattern")) options.pattern = block["pattern"].get<std::string>();
    predicate = std::make_shared<JudgeFallbackPredicate>(truth, context.judge,
                                                         std::move(options));
  } else {
    throw ConfigError("unknown predicate kind '" + kind + "'");
  }
  if (get_or<bool>(block, "negate", false)) {
    predicate = std::make_shared<NegatedPredicate>(predicate);
  }
  return predicate;
}

std::string predicate_description(const json& block) {
  return get_or<std::string>(block, "description", "the output predicate holds");
}

}  // namespace ragrules
