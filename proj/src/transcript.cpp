#include "ragrules/transcript.hpp"

#include <fstream>

#include "ragrules/errors.hpp"

namespace ragrules {

TranscriptStore TranscriptStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open transcript " + path.string());
  TranscriptStore store;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto object = nlohmann::json::parse(line);
      TranscriptEntry entry{object.at("request_hash").get<std::string>(),
                            object.at("request"),
                            object.at("response_text").get<std::string>()};
      if (request_hash(entry.request) != entry.request_hash) {
        throw LoadError("request_hash does not match request");
      }
      store.insert(std::move(entry));
    } catch (const std::exception& e) {
      throw LoadError(path.string() + ":" + std::to_string(line_number) +
                      ": " + e.what());
    }
  }
  return store;
}

std::optional<std::string> TranscriptStore::find(const std::string& hash) const {
  std::lock_guard lock(mutex_);
  const auto it = index_.find(hash);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].response_text;
}

bool TranscriptStore::insert(TranscriptEntry entry) {
  std::lock_guard lock(mutex_);
  if (index_.contains(entry.request_hash)) return false;
  index_.emplace(entry.request_hash, entries_.size());
  entries_.push_back(std::move(entry));
  return true;
}

std::string to_jsonl(const TranscriptEntry& entry) {
  return nlohmann::json{{"request_hash", entry.request_hash},
                        {"request", entry.request},
                        {"response_text", entry.response_text}}
      .dump();
}

std::size_t TranscriptStore::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<TranscriptEntry> TranscriptStore::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

void TranscriptStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LoadError("cannot write transcript " + path.string());
  for (const auto& entry : entries()) {
    out << to_jsonl(entry) << '\n';
  }
}

ReplayChatClient::ReplayChatClient(std::shared_ptr<const TranscriptStore> store,
                                   ChatSettings settings)
    : store_(std::move(store)), settings_(std::move(settings)) {
  if (!store_) throw ConfigError("replay client needs a transcript store");
}

std::string ReplayChatClient::complete(const ChatRequest& request) {
  const std::string hash = request_hash(chat_request_body(settings_, request));
  auto response = store_->find(hash);
  if (!response) {
    throw InferenceError("no recorded response for request " + hash);
  }
  return *std::move(response);
}

RecordingChatClient::RecordingChatClient(std::shared_ptr<ChatClient> inner,
                                         ChatSettings settings,
                                         std::shared_ptr<TranscriptStore> store,
                                         std::optional<std::filesystem::path> append_to)
    : inner_(std::move(inner)),
      settings_(std::move(settings)),
      store_(std::move(store)),
      append_to_(std::move(append_to)) {
  if (!inner_ || !store_) {
    throw ConfigError("recording client needs an inner client and a store");
  }
}

std::string RecordingChatClient::complete(const ChatRequest& request) {
  auto body = chat_request_body(settings_, request);
  std::string hash = request_hash(body);
  std::string response = inner_->complete(request);
  TranscriptEntry entry{std::move(hash), std::move(body), response};
  const std::string line = to_jsonl(entry);
  if (store_->insert(std::move(entry)) && append_to_) {
    std::lock_guard lock(file_mutex_);
    std::ofstream out(*append_to_, std::ios::app);
    if (!out) throw InferenceError("cannot append to " + append_to_->string());
    out << line << '\n';
  }
  return response;
}

}  // namespace ragrules
