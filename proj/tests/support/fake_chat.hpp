#pragma once

#include <atomic>
#include <functional>
#include <string>

#include "ragrules/chat.hpp"

namespace testing_support {

class FakeChat final : public ragrules::ChatClient {
 public:
  explicit FakeChat(std::function<std::string(const ragrules::ChatRequest&)> reply)
      : reply_(std::move(reply)) {}
  std::string complete(const ragrules::ChatRequest& request) override {
    ++calls;
    last_user = request.user;
    return reply_(request);
  }
  std::atomic<int> calls{0};
  std::string last_user;

 private:
  std::function<std::string(const ragrules::ChatRequest&)> reply_;
};

}  // namespace testing_support
