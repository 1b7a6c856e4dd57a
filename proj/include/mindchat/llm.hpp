#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindchat/suggest.hpp"

namespace mindchat {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct FewShotExample {
  std::vector<Turn> context;
  std::string text;
  SuggestionSet reply;
};

// Two or more examples per mode, weighted toward word completion.
std::vector<FewShotExample> DefaultFewShot();

struct LlmConfig {
  std::string endpoint = "https://api.openai.com/v1";
  std::string model = "gpt-4o-2024-08-06";
  double timeout_s = 10.0;
  int max_retries = 2;
  double backoff_s = 0.25;  // doubled after each failed attempt
  double temperature = 0.0;
  std::string api_key_env = "OPENAI_API_KEY";
  std::vector<FewShotExample> few_shot = DefaultFewShot();
};

// Throws Error(kInvalidConfig) on timeout <= 0, negative retries or an
// endpoint without http:// or https://.
void ValidateLlmConfig(const LlmConfig& cfg);

std::vector<ChatMessage> BuildPrompt(const SuggestionRequest& request, const LlmConfig& cfg);

// Throws Error(kUnparseable) when no JSON object with "words" or
// "sentences" can be recovered from the reply.
SuggestionSet ParseSuggestions(std::string_view raw, const SuggestMode& mode);

// Request-hash -> raw reply, stored as JSON.
class FixtureStore {
 public:
  enum class Mode { kRecord, kReplay };

  FixtureStore(std::filesystem::path path, Mode mode);

  Mode mode() const noexcept { return mode_; }
  std::optional<std::string> Find(const std::string& key) const;
  void Put(const std::string& key, const std::string& reply);
  void Save() const;
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  Mode mode_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
};

// 16 hex digits of FNV-1a over the canonical request body.
std::string RequestHash(const LlmConfig& cfg, const std::vector<ChatMessage>& messages);

// OpenAI-compatible chat-completions call with timeout and retries.
// Throws Error(kIoError) when every attempt fails and Error(kUnparseable)
// when the response body is not a chat completion.
std::string ChatComplete(const LlmConfig& cfg, const std::vector<ChatMessage>& messages);

// Never throws into the caller: any failure after retries returns the
// fallback's suggestions with degraded = true.
class LlmSuggester final : public Suggester {
 public:
  LlmSuggester(LlmConfig cfg, std::shared_ptr<const Suggester> fallback,
               std::shared_ptr<FixtureStore> fixtures = nullptr);

  SuggestionResult Suggest(const SuggestionRequest& request) const override;
  std::string_view name() const override { return "llm"; }

  std::size_t cache_size() const;
  std::size_t remote_calls() const;

 private:
  std::string Fetch(const std::vector<ChatMessage>& messages) const;

  LlmConfig cfg_;
  std::shared_ptr<const Suggester> fallback_;
  std::shared_ptr<FixtureStore> fixtures_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, SuggestionSet> cache_;
  mutable std::size_t remote_calls_ = 0;
};

}  // namespace mindchat
