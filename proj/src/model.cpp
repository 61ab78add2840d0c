#include "ragrules/model.hpp"

#include <stdexcept>

#include "ragrules/errors.hpp"

namespace ragrules {

ModelInput make_model_input(const SourceMask& retained,
                            const InputSet& input_set) {
  if (retained.width() != input_set.size()) {
    throw std::invalid_argument("retained mask width does not match input set");
  }
  ModelInput input;
  input.retained = retained;
  input.context = &input_set.context();
  input.sources.reserve(retained.popcount());
  for (int index : retained.indices()) {
    input.sources.emplace_back(input_set.sources()[index - 1].text);
  }
  return input;
}

ScriptedModel::ScriptedModel(int width,
                             std::unordered_map<std::uint64_t, std::string> table)
    : width_(width), table_(std::move(table)) {
  const std::uint64_t limit = full_bits(width);
  for (const auto& [bits, _] : table_) {
    if ((bits & ~limit) != 0) {
      throw ConfigError("scripted model entry outside the mask width");
    }
  }
}

ScriptedModel ScriptedModel::from_function(
    int width, const std::function<std::string(const SourceMask&)>& script) {
  if (width > 20) throw RefusalError("scripted tabulation limited to 20 sources");
  std::unordered_map<std::uint64_t, std::string> table;
  const std::uint64_t count = std::uint64_t{1} << width;
  table.reserve(count);
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    table.emplace(bits, script(SourceMask(bits, width)));
  }
  return ScriptedModel(width, std::move(table));
}

std::string ScriptedModel::infer(const ModelInput& input) {
  if (input.retained.width() != width_) {
    throw ConfigError("scripted model width " + std::to_string(width_) +
                      " queried with width " +
                      std::to_string(input.retained.width()));
  }
  const auto it = table_.find(input.retained.bits());
  if (it == table_.end()) {
    throw ConfigError("scripted model has no output for retained set " +
                      to_string(input.retained));
  }
  return it->second;
}

ValidityAssignmentModel::ValidityAssignmentModel(
    int width, std::vector<SourceMask> satisfied)
    : width_(width) {
  for (const auto& mask : satisfied) {
    if (mask.width() != width) {
      throw std::invalid_argument("validity assignment mask width mismatch");
    }
    satisfied_.insert(mask.bits());
  }
}

ValidityAssignmentModel ValidityAssignmentModel::from_packed(
    int width, std::uint64_t packed) {
  if (width < 0 || width > 6) {
    throw std::invalid_argument("packed validity assignments need width <= 6");
  }
  std::vector<SourceMask> satisfied;
  const std::uint64_t nodes = std::uint64_t{1} << width;
  for (std::uint64_t m = 0; m < nodes; ++m) {
    if ((packed >> m) & 1U) satisfied.emplace_back(m, width);
  }
  return ValidityAssignmentModel(width, std::move(satisfied));
}

bool ValidityAssignmentModel::satisfied(const SourceMask& mask) const {
  return satisfied_.contains(mask.bits());
}

std::string ValidityAssignmentModel::infer(const ModelInput& input) {
  if (input.retained.width() != width_) {
    throw ConfigError("validity assignment queried with the wrong width");
  }
  return satisfied(input.retained) ? "1" : "0";
}

ChatRequest RagPrompt::to_chat() const {
  ChatRequest request;
  request.system = instructions;
  std::string& user = request.user;
  user += "Sources:\n";
  if (sources.empty()) {
    user += kNoSourcesMarker;
    user += '\n';
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    user += "Source " + std::to_string(i + 1) + ": " + sources[i] + '\n';
  }
  user += "\nQuestion: " + question;
  return request;
}

RagPrompt assemble_prompt(const std::vector<std::string_view>& retained_sources,
                          const InputContext& context) {
  RagPrompt prompt;
  prompt.instructions = context.instructions.empty()
                            ? std::string(kDefaultRagInstructions)
                            : context.instructions;
  prompt.question = context.question;
  prompt.sources.assign(retained_sources.begin(), retained_sources.end());
  return prompt;
}

RagModel::RagModel(std::shared_ptr<ChatClient> chat) : chat_(std::move(chat)) {
  if (!chat_) throw ConfigError("RAG model needs a chat backend");
}

std::string RagModel::infer(const ModelInput& input) {
  static const InputContext kEmpty;
  const RagPrompt prompt =
      assemble_prompt(input.sources, input.context ? *input.context : kEmpty);
  return chat_->complete(prompt.to_chat());
}

std::string infer(ModelClient& client, const SourceMask& node,
                  Interpretation interpretation, const InputSet& input_set) {
  return client.infer(
      make_model_input(concrete_mask(node, interpretation), input_set));
}

}  // namespace ragrules
