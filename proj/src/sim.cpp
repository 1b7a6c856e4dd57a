#include "mindchat/sim.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "mindchat/error.hpp"
#include "mindchat/text.hpp"

namespace mindchat {

std::string_view SimModeName(SimMode mode) {
  switch (mode) {
    case SimMode::kNaive: return "naive";
    case SimMode::kDwg: return "dwg";
    case SimMode::kLlm: return "llm";
    case SimMode::kOracle: return "oracle";
  }
  return "unknown";
}

SimMode ParseSimMode(std::string_view name) {
  for (SimMode m : {SimMode::kNaive, SimMode::kDwg, SimMode::kLlm, SimMode::kOracle}) {
    if (EqualsIgnoreCase(SimModeName(m), name)) return m;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown mode '" + std::string(name) + "'");
}

double TrialTime(TrialKind kind, const TimeModel& tm, bool waiting_on_fetch) {
  double t = tm.t_shift + tm.t_stim;
  if (kind == TrialKind::kAssisted) {
    t += tm.t_decide;
    if (waiting_on_fetch) t += tm.t_llm;
  }
  return t;
}

void ValidateSimConfig(const SimConfig& cfg) {
  if (!(cfg.accuracy_p > 0.0 && cfg.accuracy_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "accuracy_p must be in (0, 1]");
  }
  const TimeModel& t = cfg.time;
  if (t.t_shift < 0 || t.t_stim < 0 || t.t_decide < 0 || t.t_llm < 0) {
    throw Error(ErrorCode::kInvalidConfig, "time model entries must be >= 0");
  }
  if (cfg.monte_carlo_runs < 1) {
    throw Error(ErrorCode::kInvalidConfig, "monte_carlo_runs must be >= 1");
  }
}

// ---------------------------------------------------------------------------
// Planner

namespace {

KeyId WordKey(int slot) { return KeyId(keys::kFirstWordSlot + slot); }
KeyId SentenceKey(int slot) { return KeyId(keys::kFirstSentenceSlot + slot); }

// "what " while the reference reads "What's ...": a finished word that a
// contraction suggestion can still extend. Returns the covered length.
std::optional<std::size_t> PendingExtension(std::string_view buffer, std::string_view ref) {
  if (buffer.size() < 2 || buffer.back() != ' ' || buffer[buffer.size() - 2] == ' ') {
    return std::nullopt;
  }
  const std::string_view head = buffer.substr(0, buffer.size() - 1);
  if (TrailingWordFragment(head).empty()) return std::nullopt;
  if (!StartsWithIgnoreCase(ref, head)) return std::nullopt;
  if (head.size() >= ref.size() || ref[head.size()] != '\'') return std::nullopt;
  return head.size();
}

}  // namespace

KeyId PlanNextKey(const SpellerState& state, std::string_view reference,
                  const SuggestionSet& sugg, const PolicyFlags& policy) {
  const std::string& buf = state.buffer;
  const auto m = ConsistentLength(buf, reference);
  // Consistent length after an undo; -1 when undo does not lead back onto the reference.
  long undo_len = -1;
  if (!state.history.empty()) {
    if (const auto u = ConsistentLength(state.history.back(), reference)) undo_len = static_cast<long>(*u);
  }

  if (m) {
    if (MatchesReference(buf, reference)) return KeyId(keys::kEnter);
    // An accidental delete or word choice is cheapest to take back.
    if (undo_len > static_cast<long>(*m)) return KeyId(keys::kUndo);

    if (policy.use_sentences) {
      for (int j = 0; j < kSentenceSlots; ++j) {
        const auto& s = sugg.sentences[j];
        if (!s.empty() && MatchesReference(s, reference)) return SentenceKey(j);
      }
    }
    if (policy.use_sentences && policy.shortcut_enabled) {
      int best = -1;
      std::size_t best_len = *m + 2;  // must gain more than two characters
      for (int j = 0; j < kSentenceSlots; ++j) {
        const auto& s = sugg.sentences[j];
        if (s.empty()) continue;
        const auto l = ConsistentLength(ApplyDelete(s), reference);
        if (l && *l > best_len) {
          best = j;
          best_len = *l;
        }
      }
      if (best >= 0) return SentenceKey(best);
    }
    if (policy.use_words) {
      int best = -1;
      std::size_t best_len = *m;
      for (int j = 0; j < kWordSlots; ++j) {
        const auto& w = sugg.words[j];
        if (w.empty()) continue;
        const auto l = ConsistentLength(ApplyWordSlot(buf, w), reference);
        if (l && *l > best_len) {
          best = j;
          best_len = *l;
        }
      }
      if (best >= 0) return WordKey(best);
    }
    if (policy.use_words && policy.shortcut_enabled) {
      int best = -1;
      std::size_t best_len = *m;
      for (int j = 0; j < kWordSlots; ++j) {
        const auto& w = sugg.words[j];
        if (w.empty()) continue;
        const auto l = PendingExtension(ApplyWordSlot(buf, w), reference);
        if (l && *l > best_len) {
          best = j;
          best_len = *l;
        }
      }
      if (best >= 0) return WordKey(best);
    }
    if (*m >= reference.size()) {
      throw Error(ErrorCode::kStuckState, "no key makes progress on \"" + buf + "\"");
    }
    return KeyForChar(reference[*m]);
  }

  if (policy.shortcut_enabled && policy.use_words) {
    if (const auto covered = PendingExtension(buf, reference)) {
      int best = -1;
      std::size_t best_len = *covered;
      for (int j = 0; j < kWordSlots; ++j) {
        const auto& w = sugg.words[j];
        if (w.empty()) continue;
        const auto l = ConsistentLength(ApplyWordSlot(buf, w), reference);
        if (l && *l > best_len) {
          best = j;
          best_len = *l;
        }
      }
      if (best >= 0) return WordKey(best);
    }
  }
  if (policy.shortcut_enabled) {
    const auto del_len = ConsistentLength(ApplyDelete(buf), reference);
    if (del_len && static_cast<long>(*del_len) > undo_len) return KeyId(keys::kDelete);
  }
  return KeyId(keys::kUndo);
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

std::uint64_t SplitMix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Uniform01(std::uint64_t& state) {
  return static_cast<double>(SplitMix(state) >> 11) * 0x1.0p-53;
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = seed;
  std::uint64_t h = SplitMix(s);
  s = h ^ a;
  h = SplitMix(s);
  s = h ^ b;
  return SplitMix(s);
}

UtteranceResult SimulateUtterance(const DialogueItem& item, const SimConfig& cfg,
                                  const Suggester& suggester, int run) {
  ValidateSimConfig(cfg);
  const std::string& ref = item.target();
  const long limit = kGuardFactor * static_cast<long>(ref.size() + 1);

  UtteranceResult out;
  out.id = item.id;
  out.category = item.category;
  out.mode = cfg.mode;
  out.run = run;

  std::uint64_t rng = DeriveSeed(cfg.seed, Fnv1a(item.id), static_cast<std::uint64_t>(run));
  const bool assisted = cfg.mode != SimMode::kNaive;
  const bool waits = (cfg.mode == SimMode::kLlm || cfg.mode == SimMode::kOracle) && !cfg.pipelined;
  const double trial_s =
      TrialTime(assisted ? TrialKind::kAssisted : TrialKind::kPlain, cfg.time, waits);

  const std::vector<Turn> context = item.context();
  const std::string category(CategoryName(item.category));
  auto fetch = [&](const std::string& buffer) {
    StampedSuggestions s;
    s.state_hash = StateHash(buffer);
    if (!assisted) return s;
    try {
      SuggestionResult r = suggester.Suggest({buffer, context, category});
      s.set = std::move(r.set);
      s.degraded = r.degraded;
    } catch (const Error&) {
      // The oracle has nothing to say about text that left the reference.
      s.degraded = true;
    }
    if (s.degraded) ++out.degraded_fetches;
    return s;
  };

  SpellerState state;
  state.active = fetch(state.buffer);
  while (!state.finalized) {
    if (out.keystrokes >= limit) {
      out.aborted = true;
      break;
    }
    const KeyId intended = PlanNextKey(state, ref, state.active.set, cfg.policy);
    KeyId decoded = intended;
    if (cfg.accuracy_p < 1.0 && Uniform01(rng) >= cfg.accuracy_p) {
      int k = 1 + static_cast<int>(SplitMix(rng) % (kNumKeys - 1));
      if (k >= intended.index()) ++k;
      decoded = KeyId(k);
    }
    ++out.keystrokes;
    out.time_s += trial_s;

    if (decoded.index() == keys::kEnter) {
      // Submitting text that does not match is refused; the trial is spent.
      if (MatchesReference(state.buffer, ref)) state.finalized = true;
    } else {
      SpellerState next;
      try {
        next = ApplyKey(state, decoded);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptySlotSelected) throw;
        next = state;
      }
      if (next.buffer != state.buffer) {
        next.active = fetch(next.buffer);
      } else {
        next.active = state.active;
      }
      state = std::move(next);
    }
    if (cfg.record_trace) {
      out.trace.push_back({state.buffer, decoded.index(), intended.index(), decoded != intended});
    }
  }
  out.completed = state.finalized;
  return out;
}

SuggesterFactory MakeSuggesterFactory(SimMode mode, const SuggesterSetup& setup) {
  switch (mode) {
    case SimMode::kNaive: {
      auto null = std::make_shared<const NullSuggester>();
      return [null](const DialogueItem&) { return null; };
    }
    case SimMode::kDwg: {
      if (!setup.lexicon) throw Error(ErrorCode::kInvalidConfig, "dwg mode needs a word list");
      std::shared_ptr<const Suggester> trie = std::make_shared<const TrieSuggester>(setup.lexicon);
      return [trie](const DialogueItem&) { return trie; };
    }
    case SimMode::kOracle: {
      const auto st = setup.oracle_single_turn;
      const auto mt = setup.oracle_multi_turn;
      return [st, mt](const DialogueItem& item) -> std::shared_ptr<const Suggester> {
        return std::make_shared<const OracleSuggester>(item.target(),
                                                       IsMultiTurn(item.category) ? mt : st);
      };
    }
    case SimMode::kLlm: {
      if (!setup.llm) throw Error(ErrorCode::kInvalidConfig, "llm mode needs an llm config");
      std::shared_ptr<const Suggester> fallback;
      if (setup.lexicon) {
        fallback = std::make_shared<const TrieSuggester>(setup.lexicon);
      } else {
        fallback = std::make_shared<const NullSuggester>();
      }
      std::shared_ptr<const Suggester> llm =
          std::make_shared<const LlmSuggester>(*setup.llm, fallback, setup.fixtures);
      return [llm](const DialogueItem&) { return llm; };
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown mode");
}

std::vector<UtteranceResult> RunSimulation(const std::vector<DialogueItem>& items,
                                           const SimConfig& cfg, const SuggesterFactory& factory) {
  ValidateSimConfig(cfg);
  std::vector<UtteranceResult> out;
  out.reserve(items.size() * static_cast<std::size_t>(cfg.monte_carlo_runs));
  for (const auto& item : items) {
    const auto suggester = factory(item);
    for (int run = 0; run < cfg.monte_carlo_runs; ++run) {
      out.push_back(SimulateUtterance(item, cfg, *suggester, run));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reporting

double Savings(double assisted, double naive) { return 1.0 - assisted / naive; }

std::vector<MetricsRow> Aggregate(const std::vector<UtteranceResult>& results) {
  if (results.empty()) throw Error(ErrorCode::kEmptySet, "no results to aggregate");

  struct Acc {
    std::size_t n = 0;
    double keys = 0.0;
    double time = 0.0;
  };
  // Key: (category order, mode). Category order 4 = overall.
  std::map<std::pair<int, SimMode>, Acc> acc;
  for (const auto& r : results) {
    for (int c : {static_cast<int>(r.category), 4}) {
      Acc& a = acc[{c, r.mode}];
      a.n += 1;
      a.keys += static_cast<double>(r.keystrokes);
      a.time += r.time_s;
    }
  }

  std::vector<MetricsRow> rows;
  for (const auto& [key, a] : acc) {
    MetricsRow row;
    row.category = key.first == 4 ? "overall"
                                  : std::string(CategoryName(static_cast<Category>(key.first)));
    row.mode = key.second;
    row.samples = a.n;
    row.mean_keystrokes = a.keys / static_cast<double>(a.n);
    row.mean_time_s = a.time / static_cast<double>(a.n);
    if (auto it = acc.find({key.first, SimMode::kNaive}); it != acc.end()) {
      const Acc& naive = it->second;
      row.savings_keystrokes =
          Savings(row.mean_keystrokes, naive.keys / static_cast<double>(naive.n));
      row.savings_time = Savings(row.mean_time_s, naive.time / static_cast<double>(naive.n));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string Fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

void WriteReportCsv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "category,mode,samples,mean_keystrokes,mean_time_s,savings_keystrokes,savings_time\n";
  for (const auto& r : rows) {
    out << r.category << "," << SimModeName(r.mode) << "," << r.samples << ","
        << Fixed(r.mean_keystrokes) << "," << Fixed(r.mean_time_s) << ","
        << (r.savings_keystrokes ? Fixed(*r.savings_keystrokes) : "") << ","
        << (r.savings_time ? Fixed(*r.savings_time) : "") << "\n";
  }
}

nlohmann::json ReportToJson(const std::vector<MetricsRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"category", r.category},
                   {"mode", SimModeName(r.mode)},
                   {"samples", r.samples},
                   {"mean_keystrokes", r.mean_keystrokes},
                   {"mean_time_s", r.mean_time_s},
                   {"savings_keystrokes", r.savings_keystrokes ? nlohmann::json(*r.savings_keystrokes)
                                                               : nlohmann::json(nullptr)},
                   {"savings_time",
                    r.savings_time ? nlohmann::json(*r.savings_time) : nlohmann::json(nullptr)}});
  }
  return out;
}

nlohmann::json ResultToJson(const UtteranceResult& r) {
  auto trace = nlohmann::json::array();
  for (const auto& s : r.trace) {
    trace.push_back({{"buffer", s.buffer}, {"key", s.key}, {"intended", s.intended},
                     {"error", s.was_error}});
  }
  return {{"id", r.id},
          {"category", CategoryName(r.category)},
          {"mode", SimModeName(r.mode)},
          {"run", r.run},
          {"keystrokes", r.keystrokes},
          {"time_s", r.time_s},
          {"completed", r.completed},
          {"aborted", r.aborted},
          {"degraded_fetches", r.degraded_fetches},
          {"trace", std::move(trace)}};
}

void WriteTracesJsonl(std::ostream& out, const std::vector<UtteranceResult>& results) {
  for (const auto& r : results) out << ResultToJson(r).dump() << "\n";
}

}  // namespace mindchat
