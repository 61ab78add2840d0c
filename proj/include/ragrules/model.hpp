#pragma once

// The black-box model M(s', c) behind a uniform interface.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ragrules/chat.hpp"
#include "ragrules/lattice.hpp"

namespace ragrules {

enum class ModelKind { kScripted, kValidityAssignment, kRemoteLlm };

// One inference request. `retained` is the concrete retained set; `sources`
// are the matching texts in input order (views into the InputSet).
struct ModelInput {
  SourceMask retained;
  std::vector<std::string_view> sources;
  const InputContext* context = nullptr;
};

ModelInput make_model_input(const SourceMask& retained,
                            const InputSet& input_set);

// Implementations must tolerate concurrent infer() calls. Failures throw
// InferenceError (transport) or ConfigError (scripted miss).
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string infer(const ModelInput& input) = 0;
  virtual ModelKind kind() const = 0;
};

// Fixed table from retained mask to output. Immutable after construction.
class ScriptedModel final : public ModelClient {
 public:
  ScriptedModel(int width, std::unordered_map<std::uint64_t, std::string> table);
  // Tabulates `script` over all 2^width retained sets up front.
  static ScriptedModel from_function(
      int width, const std::function<std::string(const SourceMask&)>& script);

  std::string infer(const ModelInput& input) override;
  ModelKind kind() const override { return ModelKind::kScripted; }
  int width() const { return width_; }

 private:
  int width_;
  std::unordered_map<std::uint64_t, std::string> table_;
};

// Answers "1" when the retained mask is marked satisfied, else "0".
class ValidityAssignmentModel final : public ModelClient {
 public:
  ValidityAssignmentModel(int width, std::vector<SourceMask> satisfied);
  // Bit m of `packed` marks node m satisfied; requires width <= 6.
  static ValidityAssignmentModel from_packed(int width,
                                             std::uint64_t packed);

  std::string infer(const ModelInput& input) override;
  ModelKind kind() const override { return ModelKind::kValidityAssignment; }
  bool satisfied(const SourceMask& mask) const;

 private:
  int width_;
  std::unordered_set<std::uint64_t> satisfied_;
};

inline constexpr std::string_view kDefaultRagInstructions =
    "Answer the question using only the information from the provided "
    "sources. Do not use any prior knowledge. Reply with a short answer.";

inline constexpr std::string_view kNoSourcesMarker = "(no sources provided)";

struct RagPrompt {
  std::string instructions;
  std::vector<std::string> sources;
  std::string question;

  // Chat rendering: instructions as the system turn, numbered sources and
  // the question as the user turn.
  ChatRequest to_chat() const;
};

// Keeps sources in the order given; each is labeled "Source i:" by position.
RagPrompt assemble_prompt(const std::vector<std::string_view>& retained_sources,
                          const InputContext& context);

// Remote M: assembles the RAG prompt and sends it to a chat backend.
class RagModel final : public ModelClient {
 public:
  explicit RagModel(std::shared_ptr<ChatClient> chat);
  std::string infer(const ModelInput& input) override;
  ModelKind kind() const override { return ModelKind::kRemoteLlm; }

 private:
  std::shared_ptr<ChatClient> chat_;
};

// Convenience: infer on the concrete input for a lattice node.
std::string infer(ModelClient& client, const SourceMask& node,
                  Interpretation interpretation, const InputSet& input_set);

}  // namespace ragrules
