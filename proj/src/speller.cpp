#include "mindchat/speller.hpp"

#include <ostream>

#include "mindchat/error.hpp"
#include "mindchat/text.hpp"

namespace mindchat {

std::uint64_t StateHash(std::string_view buffer) { return Fnv1a(buffer); }

std::string ApplyWordSlot(std::string_view buffer, std::string_view word) {
  std::string out(buffer);
  if (!out.empty() && out.back() != ' ') {
    out.resize(out.size() - TrailingWordFragment(out).size());
  } else if (out.size() >= 2 && out.back() == ' ' && out[out.size() - 2] != ' ') {
    const std::string_view head(out.data(), out.size() - 1);
    const std::string_view last = TrailingWordFragment(head);
    if (!last.empty() && word.size() > last.size() + 1 && StartsWithIgnoreCase(word, last) &&
        word[last.size()] == '\'') {
      out.resize(head.size() - last.size());
    }
  }
  out += word;
  out += ' ';
  return out;
}

std::string ApplyDelete(std::string_view buffer) { return DropLastToken(buffer); }

std::string DisplayBuffer(std::string_view buffer) {
  std::size_t end = buffer.size();
  while (end > 0 && buffer[end - 1] == ' ') --end;
  return std::string(buffer.substr(0, end));
}

SpellerState ApplyKey(const SpellerState& state, KeyId key, const StampedSuggestions& sugg) {
  if (state.finalized) throw Error(ErrorCode::kAlreadyFinalized, "session already submitted");

  const KeyInfo& info = CanonicalLayout().key(key);
  SpellerState next = state;
  next.active = {};
  std::string buffer = state.buffer;

  auto slot_text = [&](const std::string& text) -> const std::string& {
    if (sugg.state_hash != StateHash(state.buffer)) {
      throw Error(ErrorCode::kStaleSuggestions, "suggestions were computed for another text");
    }
    if (text.empty()) {
      throw Error(ErrorCode::kEmptySlotSelected,
                  "key " + std::to_string(key.index()) + " has no suggestion");
    }
    return text;
  };

  switch (info.role) {
    case KeyRole::kLetter:
      buffer.push_back(*info.character);
      break;
    case KeyRole::kPunctuation:
      // ',' and '?' attach to the previous word.
      if (*info.character != '\'') {
        while (!buffer.empty() && buffer.back() == ' ') buffer.pop_back();
      }
      buffer.push_back(*info.character);
      break;
    case KeyRole::kSpace:
      buffer.push_back(' ');
      break;
    case KeyRole::kWordSlot:
      buffer = ApplyWordSlot(buffer, slot_text(sugg.set.words[info.slot]));
      break;
    case KeyRole::kSentenceSlot:
      buffer = slot_text(sugg.set.sentences[info.slot]);
      break;
    case KeyRole::kDelete:
      buffer = ApplyDelete(buffer);
      break;
    case KeyRole::kUndo:
      if (!next.history.empty()) {
        next.buffer = std::move(next.history.back());
        next.history.pop_back();
      }
      return next;
    case KeyRole::kEnter:
      next.finalized = true;
      return next;
  }

  if (buffer != state.buffer) {
    next.history.push_back(state.buffer);
    next.buffer = std::move(buffer);
  }
  return next;
}

// ---------------------------------------------------------------------------

std::string_view EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kTrialStarted: return "TrialStarted";
    case EventKind::kKeyDecoded: return "KeyDecoded";
    case EventKind::kSuggestionsUpdated: return "SuggestionsUpdated";
    case EventKind::kFinalized: return "Finalized";
  }
  return "unknown";
}

EventKind ParseEventKind(std::string_view name) {
  for (EventKind k : {EventKind::kTrialStarted, EventKind::kKeyDecoded,
                      EventKind::kSuggestionsUpdated, EventKind::kFinalized}) {
    if (EventKindName(k) == name) return k;
  }
  throw Error(ErrorCode::kSchemaError, "unknown event kind '" + std::string(name) + "'");
}

nlohmann::json EventToJson(const SessionEvent& e) {
  return {{"seq", e.seq},
          {"kind", EventKindName(e.kind)},
          {"timestamp_s", e.timestamp_s},
          {"payload", e.payload}};
}

SessionEvent EventFromJson(const nlohmann::json& j) {
  try {
    return {j.at("seq").get<std::uint64_t>(), ParseEventKind(j.at("kind").get<std::string>()),
            j.at("timestamp_s").get<double>(), j.at("payload")};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("bad event: ") + e.what());
  }
}

void WriteEventLog(std::ostream& out, const std::vector<SessionEvent>& events) {
  for (const auto& e : events) out << EventToJson(e).dump() << "\n";
}

SpellerSession::SpellerSession(std::shared_ptr<const Suggester> suggester,
                               std::vector<Turn> context, std::string category)
    : suggester_(std::move(suggester)),
      context_(std::move(context)),
      category_(std::move(category)),
      t0_(std::chrono::steady_clock::now()) {}

SessionEvent SpellerSession::Emit(EventKind kind, nlohmann::json payload) {
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  SessionEvent e{log_.size(), kind, t, std::move(payload)};
  log_.push_back(e);
  return e;
}

StampedSuggestions SpellerSession::FetchSuggestions(const std::string& buffer) const {
  StampedSuggestions out;
  out.state_hash = StateHash(buffer);
  if (!suggester_) return out;
  try {
    SuggestionResult r = suggester_->Suggest({buffer, context_, category_});
    out.set = std::move(r.set);
    out.degraded = r.degraded;
    out.note = std::move(r.note);
  } catch (const std::exception& e) {
    out.set = {};
    out.degraded = true;
    out.note = e.what();
  }
  return out;
}

bool SpellerSession::CommitSuggestions(const StampedSuggestions& s) {
  if (s.state_hash != StateHash(state_.buffer)) return false;
  state_.active = s;
  return true;
}

SessionEvent SpellerSession::SuggestionsEvent() {
  const auto& a = state_.active;
  nlohmann::json payload = SuggestionSetToJson(a.set);
  payload["state_hash"] = a.state_hash;
  payload["degraded"] = a.degraded;
  if (!a.note.empty()) payload["note"] = a.note;
  return Emit(EventKind::kSuggestionsUpdated, std::move(payload));
}

std::vector<SessionEvent> SpellerSession::Start() {
  CommitSuggestions(FetchSuggestions(state_.buffer));
  return {SuggestionsEvent()};
}

std::vector<SessionEvent> SpellerSession::Refresh() {
  if (state_.finalized) return {};
  CommitSuggestions(FetchSuggestions(state_.buffer));
  return {SuggestionsEvent()};
}

std::vector<SessionEvent> SpellerSession::RunTrial(KeyId decoded) {
  if (state_.finalized) throw Error(ErrorCode::kAlreadyFinalized, "session already submitted");
  SpellerState next = ApplyKey(state_, decoded);

  std::vector<SessionEvent> events;
  ++trials_;
  events.push_back(Emit(EventKind::kTrialStarted, {{"trial", trials_}}));
  const std::string before = state_.buffer;
  state_ = std::move(next);
  events.push_back(Emit(EventKind::kKeyDecoded,
                        {{"key", decoded.index()},
                         {"role", KeyRoleName(CanonicalLayout().key(decoded).role)},
                         {"before", before},
                         {"after", state_.buffer}}));
  if (state_.finalized) {
    events.push_back(Emit(EventKind::kFinalized, {{"text", state_.buffer}}));
    return events;
  }
  CommitSuggestions(FetchSuggestions(state_.buffer));
  events.push_back(SuggestionsEvent());
  return events;
}

}  // namespace mindchat
