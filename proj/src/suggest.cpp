#include "mindchat/suggest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "mindchat/error.hpp"
#include "mindchat/text.hpp"

namespace mindchat {

nlohmann::json SuggestionSetToJson(const SuggestionSet& set) {
  return {{"words", set.words}, {"sentences", set.sentences}};
}

SuggestionSet SuggestionSetFromJson(const nlohmann::json& j) {
  SuggestionSet set;
  const auto& words = j.at("words");
  const auto& sentences = j.at("sentences");
  if (words.size() != kWordSlots || sentences.size() != kSentenceSlots) {
    throw Error(ErrorCode::kSchemaError, "suggestion set must have 5 words and 2 sentences");
  }
  for (int i = 0; i < kWordSlots; ++i) set.words[i] = words[i].get<std::string>();
  for (int i = 0; i < kSentenceSlots; ++i) set.sentences[i] = sentences[i].get<std::string>();
  return set;
}

SuggestMode ModeOf(std::string_view current_text) {
  if (current_text.empty() || current_text.back() == ' ' ||
      IsSentencePunct(current_text.back())) {
    return {};
  }
  return {SuggestMode::Kind::kWordCompletion, std::string(TrailingWordFragment(current_text))};
}

// ---------------------------------------------------------------------------

TrieLexicon TrieLexicon::Build(const std::vector<WordFrequency>& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kInvalidConfig, "word corpus is empty");

  std::map<std::string, std::int64_t> merged;
  for (const auto& [word, count] : corpus) {
    if (count < 0) {
      throw Error(ErrorCode::kInvalidConfig, "negative count for word '" + word + "'");
    }
    if (word.empty()) continue;
    merged[CaseFold(word)] += count;
  }

  TrieLexicon lex;
  lex.words_.assign(merged.begin(), merged.end());
  lex.nodes_.emplace_back();
  for (int w = 0; w < static_cast<int>(lex.words_.size()); ++w) {
    int node = 0;
    for (char c : lex.words_[w].first) {
      int next = lex.Child(node, c);
      if (next < 0) {
        next = static_cast<int>(lex.nodes_.size());
        lex.nodes_.emplace_back();
        auto& kids = lex.nodes_[node].children;
        kids.insert(std::lower_bound(kids.begin(), kids.end(), std::make_pair(c, 0)),
                    {c, next});
      }
      node = next;
    }
    lex.nodes_[node].word = w;
  }

  // words_ is sorted lexicographically, so comparing indices breaks ties.
  auto better = [&lex](int a, int b) {
    if (lex.words_[a].second != lex.words_[b].second) {
      return lex.words_[a].second > lex.words_[b].second;
    }
    return a < b;
  };
  // Children always have larger indices than their parent.
  for (int n = static_cast<int>(lex.nodes_.size()) - 1; n >= 0; --n) {
    Node& node = lex.nodes_[n];
    std::vector<int> pool;
    if (node.word >= 0) pool.push_back(node.word);
    for (const auto& [c, child] : node.children) {
      const auto& t = lex.nodes_[child].top;
      pool.insert(pool.end(), t.begin(), t.end());
    }
    const std::size_t keep = std::min<std::size_t>(pool.size(), kWordSlots);
    std::partial_sort(pool.begin(), pool.begin() + keep, pool.end(), better);
    pool.resize(keep);
    node.top = std::move(pool);
  }
  return lex;
}

int TrieLexicon::Child(int node, char c) const {
  const auto& kids = nodes_[node].children;
  auto it = std::lower_bound(kids.begin(), kids.end(), std::make_pair(c, 0));
  return (it != kids.end() && it->first == c) ? it->second : -1;
}

std::vector<std::string> TrieLexicon::Complete(std::string_view prefix, int limit) const {
  int node = 0;
  for (char c : CaseFold(prefix)) {
    node = Child(node, c);
    if (node < 0) return {};
  }
  std::vector<std::string> out;
  for (int w : nodes_[node].top) {
    if (static_cast<int>(out.size()) >= limit) break;
    out.push_back(words_[w].first);
  }
  return out;
}

std::vector<WordFrequency> LoadWordFrequencyTsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<WordFrequency> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kSchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": expected word<TAB>count");
    }
    try {
      out.emplace_back(line.substr(0, tab), std::stoll(line.substr(tab + 1)));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kSchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": bad count");
    }
  }
  return out;
}

SuggestionSet TrieSuggest(const TrieLexicon& lexicon, const SuggestionRequest& request) {
  const SuggestMode mode = ModeOf(request.current_text);
  SuggestionSet set;
  const auto words = lexicon.Complete(mode.completion() ? mode.prefix : std::string_view{});
  std::copy(words.begin(), words.end(), set.words.begin());
  return set;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 12> kDecoyWords = {
    "maybe", "okay", "thanks", "sure", "please", "really",
    "today", "later", "again", "never", "tomorrow", "sorry"};

constexpr std::array<std::string_view, 4> kDecoySentences = {
    "Could you say that again?", "I am not sure about that",
    "Let me think about it", "That sounds good to me"};

std::string StripTrailingMarks(std::string_view token) {
  while (!token.empty() && (token.back() == ',' || token.back() == '?')) token.remove_suffix(1);
  return std::string(token);
}

}  // namespace

SuggestionSet OracleSuggest(const SuggestionRequest& request, std::string_view reference,
                            const OracleProfile& profile) {
  const auto pos = ConsistentLength(request.current_text, reference);
  if (!pos) {
    throw Error(ErrorCode::kInconsistentState,
                "\"" + request.current_text + "\" is not a prefix of the reference");
  }

  std::vector<std::string> ref_words;
  {
    std::istringstream ss{std::string(reference)};
    for (std::string tok; ss >> tok;) ref_words.push_back(CaseFold(StripTrailingMarks(tok)));
  }

  SuggestionSet set;
  int word_slot = 0;
  int sentence_slot = 0;

  if (*pos < reference.size()) {
    std::size_t start = *pos;
    while (start > 0 && reference[start - 1] != ' ') --start;
    std::size_t end = reference.find(' ', start);
    if (end == std::string_view::npos) end = reference.size();
    const std::string word = StripTrailingMarks(reference.substr(start, end - start));
    const auto typed = static_cast<long long>(*pos - start);
    if (!word.empty() && typed >= profile.word_after) set.words[word_slot++] = word;
  }
  if (static_cast<long long>(*pos) >= profile.sentence_after) {
    set.sentences[sentence_slot++] = std::string(reference);
  }

  for (std::string_view decoy : kDecoyWords) {
    if (word_slot == kWordSlots) break;
    const bool clashes = std::any_of(ref_words.begin(), ref_words.end(), [&](const auto& w) {
      return !w.empty() && (StartsWithIgnoreCase(w, decoy) || StartsWithIgnoreCase(decoy, w));
    });
    if (!clashes) set.words[word_slot++] = std::string(decoy);
  }
  for (std::string_view decoy : kDecoySentences) {
    if (sentence_slot == kSentenceSlots) break;
    if (MatchesReference(decoy, reference)) continue;
    if (ConsistentLength(DropLastToken(decoy), reference)) continue;
    set.sentences[sentence_slot++] = std::string(decoy);
  }
  return set;
}

}  // namespace mindchat
