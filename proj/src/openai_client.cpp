#include "ragrules/openai_client.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "ragrules/errors.hpp"

namespace ragrules {

std::chrono::milliseconds backoff_for_attempt(const RetryPolicy& policy,
                                              int attempt) {
  const double scaled = static_cast<double>(policy.initial_backoff.count()) *
                        std::pow(policy.multiplier, std::max(attempt, 0));
  const double capped =
      std::min(scaled, static_cast<double>(policy.max_backoff.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(capped));
}

bool is_retryable_status(int status) {
  return status == 408 || status == 409 || status == 429 ||
         (status >= 500 && status < 600);
}

std::string parse_chat_completion(const std::string& body) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw InferenceError(std::string("response body is not JSON: ") + e.what());
  }
  const auto choices = parsed.find("choices");
  if (choices == parsed.end() || !choices->is_array() || choices->empty()) {
    throw InferenceError("response has no choices");
  }
  const auto& choice = (*choices)[0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    throw InferenceError("first choice has no message content");
  }
  return choice["message"]["content"].get<std::string>();
}

struct OpenAiChatClient::Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // .../chat/completions
};

OpenAiChatClient::OpenAiChatClient(OpenAiConfig config)
    : config_(std::move(config)),
      endpoint_(std::make_unique<Endpoint>()),
      in_flight_(std::max(config_.max_in_flight, 1)) {
  if (config_.max_in_flight < 1) {
    throw ConfigError("max_in_flight must be at least 1");
  }
  const std::string& url = config_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint '" + url + "' has no scheme");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("endpoint scheme must be http or https");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  endpoint_->origin = url.substr(0, path_start);
  std::string base =
      path_start == std::string::npos ? std::string() : url.substr(path_start);
  while (!base.empty() && base.back() == '/') base.pop_back();
  endpoint_->path = base + "/chat/completions";
}

OpenAiChatClient::~OpenAiChatClient() = default;

std::string OpenAiChatClient::complete(const ChatRequest& request) {
  const std::string payload =
      chat_request_body(config_.settings, request).dump();

  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<>& sem;
    ~Release() { sem.release(); }
  } release{in_flight_};

  httplib::Client client(endpoint_->origin);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff_for_attempt(config_.retry, attempt - 1));
    }
    auto result =
        client.Post(endpoint_->path, headers, payload, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 200 && result->status < 300) {
      return parse_chat_completion(result->body);
    }
    last_error = "HTTP " + std::to_string(result->status);
    if (!is_retryable_status(result->status)) break;
  }
  throw InferenceError("chat completion to " + endpoint_->origin +
                       endpoint_->path + " failed: " + last_error);
}

}  // namespace ragrules
