#include "ragrules/chat.hpp"

#include "ragrules/digest.hpp"

namespace ragrules {

nlohmann::json chat_request_body(const ChatSettings& settings,
                                 const ChatRequest& request) {
  nlohmann::json body = {
      {"model", settings.model},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", request.system}},
                              {{"role", "user"}, {"content", request.user}}})},
      {"temperature", settings.temperature},
  };
  if (settings.seed) body["seed"] = *settings.seed;
  return body;
}

std::string request_hash(const nlohmann::json& body) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  return sha256_hex(body.dump());
}

}  // namespace ragrules
