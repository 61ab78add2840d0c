#pragma once

// Record/replay of chat exchanges so the miners can run offline.
//
// File format: JSON lines, one {request_hash, request, response_text} object
// per line. request is the exact chat-completions body; request_hash is the
// SHA-256 of its canonical dump.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ragrules/chat.hpp"

namespace ragrules {

struct TranscriptEntry {
  std::string request_hash;
  nlohmann::json request;
  std::string response_text;
};

class TranscriptStore {
 public:
  TranscriptStore() = default;
  TranscriptStore(TranscriptStore&& other) noexcept
      : entries_(std::move(other.entries_)), index_(std::move(other.index_)) {}
  // Throws LoadError if the file is unreadable or any line is malformed.
  static TranscriptStore load(const std::filesystem::path& path);

  std::optional<std::string> find(const std::string& hash) const;
  // First entry for a hash wins; returns false for ignored duplicates.
  bool insert(TranscriptEntry entry);
  std::size_t size() const;
  // Entries in insertion order.
  std::vector<TranscriptEntry> entries() const;
  void save(const std::filesystem::path& path) const;

 private:
  mutable std::mutex mutex_;
  std::vector<TranscriptEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

// Serves completions from a store. A request with no recorded response is an
// InferenceError.
class ReplayChatClient final : public ChatClient {
 public:
  ReplayChatClient(std::shared_ptr<const TranscriptStore> store,
                   ChatSettings settings);
  std::string complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<const TranscriptStore> store_;
  ChatSettings settings_;
};

// Forwards to another client and records every new exchange into a store,
// optionally appending each new line to a JSONL file as it arrives.
class RecordingChatClient final : public ChatClient {
 public:
  RecordingChatClient(std::shared_ptr<ChatClient> inner, ChatSettings settings,
                      std::shared_ptr<TranscriptStore> store,
                      std::optional<std::filesystem::path> append_to = {});
  std::string complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<ChatClient> inner_;
  ChatSettings settings_;
  std::shared_ptr<TranscriptStore> store_;
  std::optional<std::filesystem::path> append_to_;
  std::mutex file_mutex_;
};

std::string to_jsonl(const TranscriptEntry& entry);

}  // namespace ragrules
