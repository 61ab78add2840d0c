#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace ragrules {

struct ChatMessage {
  std::string role;
  std::string content;
};

// A two-message chat exchange: system instructions plus one user turn.
struct ChatRequest {
  std::string system;
  std::string user;
};

// Decoding parameters that go on the wire verbatim.
struct ChatSettings {
  std::string model = "gpt-4o-mini-2024-07-18";
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

// The chat-completions request body for `request` under `settings`. Used by
// both the live client and the transcript store so hashes line up.
nlohmann::json chat_request_body(const ChatSettings& settings,
                                 const ChatRequest& request);

// Hex SHA-256 of the canonical serialization of a request body.
std::string request_hash(const nlohmann::json& body);

// Anything that can answer a chat request. Implementations must tolerate
// concurrent calls. Failures throw InferenceError.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

}  // namespace ragrules
