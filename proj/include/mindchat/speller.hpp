#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindchat/keyboard.hpp"
#include "mindchat/suggest.hpp"

namespace mindchat {

// FNV-1a of the buffer; identifies the text state a suggestion set was
// computed from.
std::uint64_t StateHash(std::string_view buffer);

struct StampedSuggestions {
  SuggestionSet set;
  std::uint64_t state_hash = 0;
  bool degraded = false;
  std::string note;

  bool operator==(const StampedSuggestions&) const = default;
};

struct SpellerState {
  std::string buffer;
  std::vector<std::string> history;
  bool finalized = false;
  StampedSuggestions active;
};

// Result of selecting `word` from a slot on `buffer`: replaces the trailing
// partial word, or appends after a space. A contraction of the word just
// finished ("what " + "What's") replaces that word.
std::string ApplyWordSlot(std::string_view buffer, std::string_view word);

// Result of the delete key: drops trailing spaces and the last token, keeping
// the separator before it.
std::string ApplyDelete(std::string_view buffer);

// Buffer as displayed: trailing spaces removed.
std::string DisplayBuffer(std::string_view buffer);

// Pure transition. Slot keys require sugg.state_hash == StateHash(buffer).
// Throws Error(kAlreadyFinalized), Error(kEmptySlotSelected),
// Error(kStaleSuggestions).
SpellerState ApplyKey(const SpellerState& state, KeyId key, const StampedSuggestions& sugg);
inline SpellerState ApplyKey(const SpellerState& state, KeyId key) {
  return ApplyKey(state, key, state.active);
}

enum class EventKind { kTrialStarted, kKeyDecoded, kSuggestionsUpdated, kFinalized };

std::string_view EventKindName(EventKind kind);
EventKind ParseEventKind(std::string_view name);

struct SessionEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kTrialStarted;
  double timestamp_s = 0.0;
  nlohmann::json payload;
};

nlohmann::json EventToJson(const SessionEvent& e);
SessionEvent EventFromJson(const nlohmann::json& j);
void WriteEventLog(std::ostream& out, const std::vector<SessionEvent>& events);

// One writer per session. Suggestion fetches may run elsewhere, but they
// commit through CommitSuggestions, which rejects stale sets.
class SpellerSession {
 public:
  SpellerSession(std::shared_ptr<const Suggester> suggester, std::vector<Turn> context,
                 std::string category);

  // Fetches suggestions for the empty buffer.
  std::vector<SessionEvent> Start();

  // Throws Error(kAlreadyFinalized) or Error(kEmptySlotSelected); the state
  // is unchanged when it throws.
  std::vector<SessionEvent> RunTrial(KeyId decoded);

  // Switches the suggestion backend; call Refresh() to apply it.
  void SetSuggester(std::shared_ptr<const Suggester> suggester) {
    suggester_ = std::move(suggester);
  }

  // Re-fetches suggestions for the current buffer.
  std::vector<SessionEvent> Refresh();

  // Safe to call from another thread; does not touch the session state.
  StampedSuggestions FetchSuggestions(const std::string& buffer) const;

  // False (and no change) if `s` was computed for a different buffer.
  bool CommitSuggestions(const StampedSuggestions& s);

  const SpellerState& state() const noexcept { return state_; }
  const std::vector<SessionEvent>& log() const noexcept { return log_; }
  int trials() const noexcept { return trials_; }
  const std::vector<Turn>& context() const noexcept { return context_; }

 private:
  SessionEvent Emit(EventKind kind, nlohmann::json payload);
  SessionEvent SuggestionsEvent();

  std::shared_ptr<const Suggester> suggester_;
  std::vector<Turn> context_;
  std::string category_;
  SpellerState state_;
  std::vector<SessionEvent> log_;
  int trials_ = 0;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace mindchat
