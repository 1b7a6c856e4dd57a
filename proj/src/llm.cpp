#include "mindchat/llm.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <thread>

#include <httplib.h>

#include "mindchat/error.hpp"
#include "mindchat/text.hpp"

namespace mindchat {

namespace {

std::string Quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

std::string FormatUserTurn(const std::vector<Turn>& context, std::string_view text) {
  const SuggestMode mode = ModeOf(text);
  std::string out = "Conversation so far:\n";
  if (context.empty()) out += "(no earlier turns)\n";
  for (const Turn& t : context) out += t.speaker + ": " + t.utterance + "\n";
  out += "\nTyped so far: " + Quote(text) + "\n";
  if (mode.completion()) {
    out += "Task: complete the unfinished last word " + Quote(mode.prefix) + ".";
  } else {
    out += "Task: predict the next word.";
  }
  return out;
}

std::string SystemPrompt(const SuggestMode& mode) {
  std::string out =
      "You assist a person who writes with a brain-computer interface keyboard. "
      "Every character costs them a slow selection, so good suggestions save real effort. "
      "You see the conversation they are answering and the reply they have typed so far.\n\n";
  if (mode.completion()) {
    out += "For this request the last word is unfinished: it begins with " + Quote(mode.prefix) +
           ". Suggest 5 different words that each begin with " + Quote(mode.prefix) +
           " and properly complete the last word.\n";
  } else {
    out +=
        "For this request the last word is finished. Suggest 5 different words that are "
        "likely to come next.\n";
  }
  out +=
      "Also suggest 2 complete replies. Each one must start with the typed text exactly as "
      "written and continue it to the end of the sentence.\n\n"
      "Only use letters, spaces, commas, apostrophes and question marks.\n"
      "Answer with one JSON object and nothing else:\n"
      "{\"words\": [5 strings], \"sentences\": [2 strings]}\n"
      "Always give exactly 5 words and exactly 2 sentences.";
  return out;
}

std::string CleanEntry(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return CollapseWhitespace(s);
}

struct Endpoint {
  std::string scheme_host_port;
  std::string base_path;
};

Endpoint SplitEndpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw Error(ErrorCode::kInvalidConfig, "endpoint must be an http(s) URL: " + url);
  }
  std::string base = m[2].str();
  while (!base.empty() && base.back() == '/') base.pop_back();
  return {m[1].str(), base};
}

nlohmann::json RequestBody(const LlmConfig& cfg, const std::vector<ChatMessage>& messages) {
  auto msgs = nlohmann::json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", cfg.model},
          {"temperature", cfg.temperature},
          {"response_format", {{"type", "json_object"}}},
          {"messages", std::move(msgs)}};
}

std::string Hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string CacheKey(const SuggestionRequest& request) {
  auto ctx = nlohmann::json::array();
  for (const Turn& t : request.dialogue_context) ctx.push_back({t.speaker, t.utterance});
  return nlohmann::json{{"context", ctx}, {"category", request.category},
                        {"text", request.current_text}}
      .dump();
}

}  // namespace

std::vector<FewShotExample> DefaultFewShot() {
  auto make = [](std::vector<Turn> ctx, std::string text, SuggestionSet reply) {
    return FewShotExample{std::move(ctx), std::move(text), std::move(reply)};
  };
  return {
      make({{"Friend", "Are you coming to the game tonight?"}}, "I think I will be a bit l",
           {{"late", "later", "lost", "lucky", "left"},
            {"I think I will be a bit late, can you save me a seat?",
             "I think I will be a bit late, is that okay?"}}),
      make({}, "How do I treat a sore thr",
           {{"throat", "throats", "thrush", "three", "thread"},
            {"How do I treat a sore throat at home?", "How do I treat a sore throat quickly?"}}),
      make({{"Doctor", "How have you been sleeping lately?"}}, "Not very w",
           {{"well", "while", "worse", "warm", "wisely"},
            {"Not very well, I keep waking up at night",
             "Not very well, I feel tired all day"}}),
      make({{"Colleague", "Did you finish the report?"}}, "Almost, I just need ",
           {{"to", "more", "some", "a", "one"},
            {"Almost, I just need to check the numbers", "Almost, I just need one more hour"}}),
      make({}, "",
           {{"How", "What", "Can", "I", "Could"},
            {"How are you today?", "What should I eat for dinner?"}}),
  };
}

void ValidateLlmConfig(const LlmConfig& cfg) {
  if (!(cfg.timeout_s > 0.0)) throw Error(ErrorCode::kInvalidConfig, "llm timeout must be > 0");
  if (cfg.max_retries < 0) throw Error(ErrorCode::kInvalidConfig, "llm max_retries must be >= 0");
  if (cfg.backoff_s < 0.0) throw Error(ErrorCode::kInvalidConfig, "llm backoff must be >= 0");
  SplitEndpoint(cfg.endpoint);
}

std::vector<ChatMessage> BuildPrompt(const SuggestionRequest& request, const LlmConfig& cfg) {
  std::vector<ChatMessage> out;
  out.push_back({"system", SystemPrompt(ModeOf(request.current_text))});
  for (const auto& ex : cfg.few_shot) {
    out.push_back({"user", FormatUserTurn(ex.context, ex.text)});
    out.push_back({"assistant", SuggestionSetToJson(ex.reply).dump()});
  }
  out.push_back({"user", FormatUserTurn(request.dialogue_context, request.current_text)});
  return out;
}

SuggestionSet ParseSuggestions(std::string_view raw, const SuggestMode& mode) {
  const auto open = raw.find('{');
  const auto close = raw.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw Error(ErrorCode::kUnparseable, "no JSON object in reply");
  }
  const auto j = nlohmann::json::parse(raw.substr(open, close - open + 1), nullptr, false);
  if (j.is_discarded() || !j.is_object() || (!j.contains("words") && !j.contains("sentences"))) {
    throw Error(ErrorCode::kUnparseable, "reply is not a {words, sentences} object");
  }

  auto strings = [&j](const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key) || !j[key].is_array()) return out;
    for (const auto& v : j[key]) {
      if (!v.is_string()) continue;
      std::string s = CleanEntry(v.get<std::string>());
      if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
  };

  SuggestionSet set;
  int slot = 0;
  for (auto& w : strings("words")) {
    if (slot == kWordSlots) break;
    if (mode.completion() && !StartsWithIgnoreCase(w, mode.prefix)) continue;
    set.words[slot++] = std::move(w);
  }
  slot = 0;
  for (auto& s : strings("sentences")) {
    if (slot == kSentenceSlots) break;
    set.sentences[slot++] = std::move(s);
  }
  return set;
}

// ---------------------------------------------------------------------------

FixtureStore::FixtureStore(std::filesystem::path path, Mode mode)
    : path_(std::move(path)), mode_(mode) {
  std::ifstream in(path_);
  if (!in) {
    if (mode_ == Mode::kReplay) {
      throw Error(ErrorCode::kIoError, "fixture file not found: " + path_.string());
    }
    return;
  }
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("entries") || !j["entries"].is_object()) {
    throw Error(ErrorCode::kSchemaError, "malformed fixture file: " + path_.string());
  }
  for (const auto& [k, v] : j["entries"].items()) entries_[k] = v.get<std::string>();
}

std::optional<std::string> FixtureStore::Find(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FixtureStore::Put(const std::string& key, const std::string& reply) {
  std::lock_guard lock(mu_);
  entries_[key] = reply;
}

void FixtureStore::Save() const {
  std::lock_guard lock(mu_);
  const std::map<std::string, std::string> sorted(entries_.begin(), entries_.end());
  const nlohmann::json j = {{"format", "mindchat-llm-fixtures"}, {"version", 1},
                            {"entries", sorted}};
  std::ofstream out(path_);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path_.string());
  out << j.dump(2) << "\n";
}

std::size_t FixtureStore::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::string RequestHash(const LlmConfig& cfg, const std::vector<ChatMessage>& messages) {
  return Hex16(Fnv1a(RequestBody(cfg, messages).dump()));
}

std::string ChatComplete(const LlmConfig& cfg, const std::vector<ChatMessage>& messages) {
  ValidateLlmConfig(cfg);
  const Endpoint ep = SplitEndpoint(cfg.endpoint);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(cfg.timeout_s));

  httplib::Client cli(ep.scheme_host_port);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = RequestBody(cfg, messages).dump();
  const std::string path = ep.base_path + "/chat/completions";

  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0 && cfg.backoff_s > 0.0) {
      std::this_thread::sleep_for(
          std::chrono::duration<double>(cfg.backoff_s * (1 << (attempt - 1))));
    }
    auto res = cli.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kIoError, "HTTP " + std::to_string(res->status) + ": " +
                                           res->body.substr(0, 200));
    }
    const auto j = nlohmann::json::parse(res->body, nullptr, false);
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kUnparseable, "response is not a chat completion");
    }
  }
  throw Error(ErrorCode::kIoError, "chat completion failed after " +
                                       std::to_string(cfg.max_retries + 1) +
                                       " attempts (" + last_error + ")");
}

// ---------------------------------------------------------------------------

LlmSuggester::LlmSuggester(LlmConfig cfg, std::shared_ptr<const Suggester> fallback,
                           std::shared_ptr<FixtureStore> fixtures)
    : cfg_(std::move(cfg)), fallback_(std::move(fallback)), fixtures_(std::move(fixtures)) {
  ValidateLlmConfig(cfg_);
}

std::string LlmSuggester::Fetch(const std::vector<ChatMessage>& messages) const {
  const std::string hash = RequestHash(cfg_, messages);
  if (fixtures_ && fixtures_->mode() == FixtureStore::Mode::kReplay) {
    if (auto reply = fixtures_->Find(hash)) return *reply;
    throw Error(ErrorCode::kIoError, "no recorded reply for request " + hash);
  }
  {
    std::lock_guard lock(mu_);
    ++remote_calls_;
  }
  std::string reply = ChatComplete(cfg_, messages);
  if (fixtures_) fixtures_->Put(hash, reply);
  return reply;
}

SuggestionResult LlmSuggester::Suggest(const SuggestionRequest& request) const {
  const std::string key = CacheKey(request);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return {it->second, false, {}};
  }
  try {
    const std::string raw = Fetch(BuildPrompt(request, cfg_));
    SuggestionSet set = ParseSuggestions(raw, ModeOf(request.current_text));
    std::lock_guard lock(mu_);
    cache_.emplace(key, set);
    return {std::move(set), false, {}};
  } catch (const std::exception& e) {
    SuggestionResult out;
    if (fallback_) {
      try {
        out = fallback_->Suggest(request);
      } catch (const std::exception&) {
        out = {};
      }
    }
    out.degraded = true;
    out.note = e.what();
    return out;
  }
}

std::size_t LlmSuggester::cache_size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

std::size_t LlmSuggester::remote_calls() const {
  std::lock_guard lock(mu_);
  return remote_calls_;
}

}  // namespace mindchat
