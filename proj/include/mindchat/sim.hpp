#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindchat/dataset.hpp"
#include "mindchat/keyboard.hpp"
#include "mindchat/llm.hpp"
#include "mindchat/speller.hpp"
#include "mindchat/suggest.hpp"

namespace mindchat {

enum class SimMode { kNaive, kDwg, kLlm, kOracle };

std::string_view SimModeName(SimMode mode);
SimMode ParseSimMode(std::string_view name);

struct TimeModel {
  double t_shift = 0.5;
  double t_stim = 1.5;
  double t_decide = 3.0;
  double t_llm = 1.5;
};

enum class TrialKind { kPlain, kAssisted };

// plain = t_shift + t_stim; assisted adds t_decide, plus t_llm when the
// caller is still waiting on a suggestion fetch.
double TrialTime(TrialKind kind, const TimeModel& tm, bool waiting_on_fetch = false);

struct PolicyFlags {
  bool use_words = true;
  bool use_sentences = true;
  bool shortcut_enabled = false;
};

struct SimConfig {
  double accuracy_p = 1.0;
  SimMode mode = SimMode::kNaive;
  TimeModel time;
  PolicyFlags policy;
  std::uint64_t seed = 1;
  int monte_carlo_runs = 1;
  bool pipelined = false;  // fetch overlaps the next trial, hiding t_llm
  bool record_trace = true;
};

// Throws Error(kInvalidConfig).
void ValidateSimConfig(const SimConfig& cfg);

// Chooses the key a user copying `reference` would select next.
KeyId PlanNextKey(const SpellerState& state, std::string_view reference,
                  const SuggestionSet& sugg, const PolicyFlags& policy);

struct TraceStep {
  std::string buffer;  // after the decoded key was applied
  int key = 0;         // decoded
  int intended = 0;
  bool was_error = false;
};

struct UtteranceResult {
  std::string id;
  Category category = Category::kStDaily;
  SimMode mode = SimMode::kNaive;
  int run = 0;
  long keystrokes = 0;
  double time_s = 0.0;
  std::vector<TraceStep> trace;
  bool completed = false;
  bool aborted = false;  // hit the 50x naive guard
  int degraded_fetches = 0;
};

inline constexpr int kGuardFactor = 50;

// Deterministic for a given (cfg.seed, run).
UtteranceResult SimulateUtterance(const DialogueItem& item, const SimConfig& cfg,
                                  const Suggester& suggester, int run = 0);

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

using SuggesterFactory = std::function<std::shared_ptr<const Suggester>(const DialogueItem&)>;

struct SuggesterSetup {
  std::shared_ptr<const TrieLexicon> lexicon;  // dwg, and llm fallback
  OracleProfile oracle_single_turn{1, 3};
  OracleProfile oracle_multi_turn{1, 3};
  std::optional<LlmConfig> llm;
  std::shared_ptr<FixtureStore> fixtures;
};

// Throws Error(kInvalidConfig) when the mode needs something the setup lacks.
SuggesterFactory MakeSuggesterFactory(SimMode mode, const SuggesterSetup& setup);

// Every item x cfg.monte_carlo_runs.
std::vector<UtteranceResult> RunSimulation(const std::vector<DialogueItem>& items,
                                           const SimConfig& cfg, const SuggesterFactory& factory);

struct MetricsRow {
  std::string category;  // a category name or "overall"
  SimMode mode = SimMode::kNaive;
  std::size_t samples = 0;
  double mean_keystrokes = 0.0;
  double mean_time_s = 0.0;
  std::optional<double> savings_keystrokes;  // vs naive, same category
  std::optional<double> savings_time;
};

// 1 - assisted / naive.
double Savings(double assisted, double naive);

// Throws Error(kEmptySet).
std::vector<MetricsRow> Aggregate(const std::vector<UtteranceResult>& results);

void WriteReportCsv(std::ostream& out, const std::vector<MetricsRow>& rows);
nlohmann::json ReportToJson(const std::vector<MetricsRow>& rows);
nlohmann::json ResultToJson(const UtteranceResult& r);
void WriteTracesJsonl(std::ostream& out, const std::vector<UtteranceResult>& results);

}  // namespace mindchat
