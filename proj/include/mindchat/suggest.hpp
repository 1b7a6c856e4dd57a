#pragma once

#include <array>
#include <climits>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace mindchat {

inline constexpr int kWordSlots = 5;
inline constexpr int kSentenceSlots = 2;

struct Turn {
  std::string speaker;
  std::string utterance;

  bool operator==(const Turn&) const = default;
};

struct SuggestionRequest {
  std::string current_text;
  std::vector<Turn> dialogue_context;
  std::string category;
};

// Fixed 5+2 arity, one entry per key slot 33..39. Empty string = empty slot.
struct SuggestionSet {
  std::array<std::string, kWordSlots> words;
  std::array<std::string, kSentenceSlots> sentences;

  bool operator==(const SuggestionSet&) const = default;
};

nlohmann::json SuggestionSetToJson(const SuggestionSet& set);
SuggestionSet SuggestionSetFromJson(const nlohmann::json& j);

struct SuggestMode {
  enum class Kind { kWordCompletion, kWordPrediction };
  Kind kind = Kind::kWordPrediction;
  std::string prefix;  // nonempty, no spaces, for kWordCompletion

  bool completion() const noexcept { return kind == Kind::kWordCompletion; }
  bool operator==(const SuggestMode&) const = default;
};

SuggestMode ModeOf(std::string_view current_text);

struct SuggestionResult {
  SuggestionSet set;
  bool degraded = false;
  std::string note;  // why the result is degraded, if it is
};

// Request/response service. Implementations are safe to call from several
// threads at once.
class Suggester {
 public:
  virtual ~Suggester() = default;
  virtual SuggestionResult Suggest(const SuggestionRequest& request) const = 0;
  virtual std::string_view name() const = 0;
};

// Always empty: the unassisted keyboard.
class NullSuggester final : public Suggester {
 public:
  SuggestionResult Suggest(const SuggestionRequest&) const override { return {}; }
  std::string_view name() const override { return "naive"; }
};

// ---------------------------------------------------------------------------
// Trie baseline

using WordFrequency = std::pair<std::string, std::int64_t>;

class TrieLexicon {
 public:
  // Words are case-folded; duplicate entries have their counts summed.
  // Throws Error(kInvalidConfig) on an empty corpus or negative count.
  static TrieLexicon Build(const std::vector<WordFrequency>& corpus);

  // Up to `limit` (<= 5) words starting with `prefix` (case-insensitive),
  // by descending count, ties lexicographic.
  std::vector<std::string> Complete(std::string_view prefix, int limit = kWordSlots) const;

  std::size_t size() const noexcept { return words_.size(); }

 private:
  struct Node {
    std::vector<std::pair<char, int>> children;  // sorted by char
    int word = -1;
    std::vector<int> top;  // best words in this subtree
  };

  int Child(int node, char c) const;

  std::vector<Node> nodes_;
  std::vector<WordFrequency> words_;
};

// TSV with `word<TAB>count` per line; '#' lines and blanks are skipped.
std::vector<WordFrequency> LoadWordFrequencyTsv(const std::filesystem::path& path);

SuggestionSet TrieSuggest(const TrieLexicon& lexicon, const SuggestionRequest& request);

class TrieSuggester final : public Suggester {
 public:
  explicit TrieSuggester(std::shared_ptr<const TrieLexicon> lexicon)
      : lexicon_(std::move(lexicon)) {}

  SuggestionResult Suggest(const SuggestionRequest& request) const override {
    return {TrieSuggest(*lexicon_, request), false, {}};
  }
  std::string_view name() const override { return "dwg"; }

 private:
  std::shared_ptr<const TrieLexicon> lexicon_;
};

// ---------------------------------------------------------------------------
// Oracle

struct OracleProfile {
  static constexpr int kNever = INT_MAX;

  int word_after = 1;      // typed characters of the current word before it is offered
  int sentence_after = 3;  // typed characters of the utterance before it is offered
};

// Throws Error(kInconsistentState) when current_text has left the reference.
SuggestionSet OracleSuggest(const SuggestionRequest& request, std::string_view reference,
                            const OracleProfile& profile);

class OracleSuggester final : public Suggester {
 public:
  OracleSuggester(std::string reference, OracleProfile profile)
      : reference_(std::move(reference)), profile_(profile) {}

  SuggestionResult Suggest(const SuggestionRequest& request) const override {
    return {OracleSuggest(request, reference_, profile_), false, {}};
  }
  std::string_view name() const override { return "oracle"; }

 private:
  std::string reference_;
  OracleProfile profile_;
};

}  // namespace mindchat
