#pragma once

// OpenAI-compatible chat-completions client with bounded retries.

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "ragrules/chat.hpp"

namespace ragrules {

struct RetryPolicy {
  int max_retries = 4;  // attempts after the first
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{20000};
};

// Delay before retry number `attempt` (0-based), capped at max_backoff.
std::chrono::milliseconds backoff_for_attempt(const RetryPolicy& policy,
                                              int attempt);

// 408, 409, 429 and 5xx are transient; other non-2xx statuses fail at once.
bool is_retryable_status(int status);

struct OpenAiConfig {
  // Base URL up to and including the API version, e.g.
  // "https://api.openai.com/v1". "/chat/completions" is appended.
  std::string endpoint = "https://api.openai.com/v1";
  std::string api_key;
  ChatSettings settings;
  std::chrono::seconds timeout{60};
  RetryPolicy retry;
  int max_in_flight = 4;
};

// Extracts choices[0].message.content. Throws InferenceError otherwise.
std::string parse_chat_completion(const std::string& body);

class OpenAiChatClient final : public ChatClient {
 public:
  // Throws ConfigError on a malformed endpoint or a non-positive in-flight
  // limit.
  explicit OpenAiChatClient(OpenAiConfig config);
  ~OpenAiChatClient() override;

  std::string complete(const ChatRequest& request) override;
  const OpenAiConfig& config() const { return config_; }

 private:
  struct Endpoint;
  OpenAiConfig config_;
  std::unique_ptr<Endpoint> endpoint_;
  std::counting_semaphore<> in_flight_;
};

}  // namespace ragrules
