// Runs every headline acceptance criterion and prints one verdict line each:
//   PASS|FAIL|SKIP  <criterion>  (<seconds> s)  <measured values>
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindchat/bench.hpp"
#include "mindchat/cca.hpp"
#include "mindchat/dataset.hpp"
#include "mindchat/error.hpp"
#include "mindchat/llm.hpp"
#include "mindchat/sim.hpp"
#include "mindchat/speller.hpp"
#include "mindchat/suggest.hpp"
#include "mindchat/text.hpp"
#include "support/cca_oracle.hpp"
#include "support/golden_trace.hpp"
#include "support/mock_llm.hpp"
#include "support/naive_oracle.hpp"

namespace mindchat {
namespace {

namespace fs = std::filesystem;

const fs::path kData = MINDCHAT_DATA_DIR;

enum class Status { kPass, kFail, kSkip };

struct Verdict {
  Status status = Status::kFail;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Verdict Check(bool ok, std::string detail) { return {ok ? Status::kPass : Status::kFail, std::move(detail)}; }

std::vector<DialogueItem> Sample() { return LoadDataset(kData / "sample_dialogues.jsonl").items; }

std::shared_ptr<const TrieLexicon> Lexicon() {
  static const auto lexicon = std::make_shared<const TrieLexicon>(
      TrieLexicon::Build(LoadWordFrequencyTsv(kData / "word_freq.tsv")));
  return lexicon;
}

const MetricsRow& Row(const std::vector<MetricsRow>& rows, std::string_view category, SimMode mode) {
  for (const auto& r : rows) {
    if (r.category == category && r.mode == mode) return r;
  }
  throw Error(ErrorCode::kEmptySet, "no row for " + std::string(category));
}

// p = 1 naive copying costs exactly one trial per character plus enter.
Verdict NaiveExactness() {
  const auto items = Sample();
  SimConfig cfg;
  const double per_trial = cfg.time.t_shift + cfg.time.t_stim;
  int bad = 0;
  for (const auto& item : items) {
    const auto r = SimulateUtterance(item, cfg, NullSuggester{});
    const long expected = static_cast<long>(item.target().size()) + 1;
    if (!r.completed || r.keystrokes != expected ||
        r.time_s != static_cast<double>(expected) * per_trial) {
      ++bad;
    }
  }
  return Check(bad == 0 && !items.empty(),
               Fmt("%zu utterances, %d mismatches against keystrokes = L+1, time = (L+1)*%.1f s",
                   items.size(), bad, per_trial));
}

Verdict GoldenReplay() {
  const auto sets = testing::GoldenSuggestions();
  SpellerState s;
  int buffer_mismatch = 0;
  for (std::size_t i = 0; i < testing::kGoldenKeys.size(); ++i) {
    s = ApplyKey(s, KeyId(testing::kGoldenKeys[i]), {sets[i], StateHash(s.buffer), false, {}});
    if (DisplayBuffer(s.buffer) != testing::kGoldenBuffers[i]) ++buffer_mismatch;
  }
  const PolicyFlags policy{true, true, true};
  SpellerState p;
  std::string planned;
  bool keys_match = true;
  for (std::size_t i = 0; i < testing::kGoldenKeys.size(); ++i) {
    p.active = {sets[i], StateHash(p.buffer), false, {}};
    const KeyId k = PlanNextKey(p, testing::kGoldenReference, sets[i], policy);
    planned += (i ? "," : "") + std::to_string(k.index());
    keys_match &= k.index() == testing::kGoldenKeys[i];
    p = ApplyKey(p, k);
  }
  keys_match &= PlanNextKey(p, testing::kGoldenReference, {}, policy).index() == keys::kEnter;
  return Check(buffer_mismatch == 0 && keys_match,
               Fmt("%zu-key replay, %d buffer mismatches; planner keys %s", testing::kGoldenKeys.size(),
                   buffer_mismatch, planned.c_str()));
}

std::vector<MetricsRow> SampleReport(const SuggesterSetup& setup, std::vector<SimMode> modes) {
  const auto items = Sample();
  std::vector<UtteranceResult> all;
  for (SimMode m : modes) {
    SimConfig cfg;
    cfg.mode = m;
    cfg.record_trace = false;
    auto part = RunSimulation(items, cfg, MakeSuggesterFactory(m, setup));
    all.insert(all.end(), part.begin(), part.end());
  }
  return Aggregate(all);
}

Verdict KeystrokeSavings() {
  SuggesterSetup setup;
  setup.lexicon = Lexicon();
  const auto rows = SampleReport(setup, {SimMode::kNaive, SimMode::kDwg, SimMode::kOracle});
  const double oracle = *Row(rows, "overall", SimMode::kOracle).savings_keystrokes;
  const double dwg = *Row(rows, "overall", SimMode::kDwg).savings_keystrokes;
  return Check(oracle >= 0.62 && dwg > 0.0 && dwg < oracle,
               Fmt("oracle(w=1,s=3) %.2f%%, trie %.2f%% (need oracle >= 62%%, 0 < trie < oracle)",
                   100 * oracle, 100 * dwg));
}

Verdict ContextBenefit() {
  SuggesterSetup setup;
  setup.oracle_single_turn = {1, 3};
  setup.oracle_multi_turn = {1, 1};
  const auto rows = SampleReport(setup, {SimMode::kNaive, SimMode::kOracle});
  double st_max = 0.0, mt_min = 1.0;
  std::string per;
  for (Category c : kAllCategories) {
    const double s = *Row(rows, CategoryName(c), SimMode::kOracle).savings_keystrokes;
    if (IsMultiTurn(c)) {
      mt_min = std::min(mt_min, s);
    } else {
      st_max = std::max(st_max, s);
    }
    per += Fmt(" %s %.2f%%", std::string(CategoryName(c)).c_str(), 100 * s);
  }
  return Check(mt_min > st_max, "oracle s=3 single-turn, s=1 multi-turn:" + per);
}

Verdict ErrorModelCalibration() {
  const auto start = std::chrono::steady_clock::now();
  const auto items = Sample();
  const int runs_per_item = (10000 + static_cast<int>(items.size()) - 1) / static_cast<int>(items.size());
  auto mean_keystrokes = [&](double p, double* analytic) {
    SimConfig cfg;
    cfg.accuracy_p = p;
    cfg.record_trace = false;
    cfg.seed = 2024;
    double sum = 0.0, expect = 0.0;
    for (const auto& item : items) {
      for (int run = 0; run < runs_per_item; ++run) {
        sum += static_cast<double>(SimulateUtterance(item, cfg, NullSuggester{}, run).keystrokes);
      }
      expect += testing::ExpectedNaiveKeystrokes(item.target(), p);
    }
    if (analytic) *analytic = expect / static_cast<double>(items.size());
    return sum / static_cast<double>(runs_per_item * items.size());
  };
  std::vector<double> ps = {0.7, 0.8, 0.9, 1.0};
  std::vector<double> means;
  double analytic_09 = 0.0;
  for (double p : ps) means.push_back(mean_keystrokes(p, p == 0.9 ? &analytic_09 : nullptr));
  const double mc_09 = means[2];
  const double rel = std::abs(mc_09 / analytic_09 - 1.0);
  bool monotone = true;
  for (std::size_t i = 1; i < means.size(); ++i) monotone &= means[i] <= means[i - 1] * 1.01;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return Check(rel <= 0.03 && monotone && secs < 60.0,
               Fmt("%zu runs/p; p=0.9 MC %.3f vs analytic %.3f (%.2f%% off); means %.2f/%.2f/%.2f/%.2f "
                   "for p=0.7/0.8/0.9/1.0; %.1f s",
                   runs_per_item * items.size(), mc_09, analytic_09, 100 * rel, means[0], means[1],
                   means[2], means[3], secs));
}

Verdict DecoderCorrectness() {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;

  const Eigen::MatrixXd x = testing::RandomMatrix(9, 360, 1);
  const double self = CcaCorr(x, x);
  ok &= std::abs(self - 1.0) <= 1e-9;
  const Eigen::MatrixXd y = testing::RandomMatrix(10, 360, 2);
  const Eigen::MatrixXd mix = testing::RandomMatrix(9, 9, 3);
  const double mix_err = std::abs(CcaCorr(mix * x, y) - CcaCorr(x, y));
  ok &= mix_err <= 1e-6;
  double grid_err = 0.0;
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    Eigen::MatrixXd a = testing::RandomMatrix(2, 200, seed);
    const Eigen::MatrixXd b = testing::RandomMatrix(2, 200, seed + 100);
    a.row(0) += 0.7 * b.row(1);
    grid_err = std::max(grid_err, std::abs(CcaCorr(a, b) - testing::GridSearchCca(a, b)));
  }
  ok &= grid_err <= 1e-3;
  detail += Fmt("self %.12f, mixing err %.1e, grid err %.1e;", self, mix_err, grid_err);

  std::ifstream in(kData / "decoder_calibration.json");
  const nlohmann::json cal = nlohmann::json::parse(in);
  BenchConfig cfg;
  cfg.seed = cal.at("seed");
  cfg.subjects = cal.at("subjects");
  cfg.test_trials = cal.at("test_trials");
  cfg.train_per_class = cal.at("train_per_class");
  cfg.snr_db = cal.at("snr_db");
  cfg.methods = {Algorithm::kFbscca, Algorithm::kFbecca};
  const auto low = RunDecodeBench(cfg).Average();
  ok &= low[1] >= low[0] && low[1] >= 0.86 && low[1] <= 0.92;
  detail += Fmt(" at %.1f dB over %d trials FBSCCA %.1f%%, FBECCA %.1f%%;", cfg.snr_db,
                cfg.subjects * cfg.test_trials, 100 * low[0], 100 * low[1]);

  cfg.snr_db = cal.at("high_snr_db");
  cfg.train_per_class = 10;
  cfg.methods = {Algorithm::kFbtrca, Algorithm::kFbdsp};
  const auto high = RunDecodeBench(cfg).Average();
  ok &= high[0] >= 0.95 && high[1] >= 0.95;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok &= secs < 300.0;
  detail += Fmt(" at %.1f dB FBTRCA %.1f%%, FBDSP %.1f%%; %.0f s", cfg.snr_db, 100 * high[0],
                100 * high[1], secs);
  return Check(ok, detail);
}

Verdict SuggestionRobustness() {
  testing::MockEndpoint ep;
  auto reply = [](std::string content) {
    return [content](const httplib::Request&, httplib::Response& res) {
      const nlohmann::json body = {{"choices", {{{"message", {{"content", content}}}}}}};
      res.set_content(body.dump(), "application/json");
    };
  };
  const std::vector<std::pair<std::string, testing::MockEndpoint::Handler>> faults = {
      {"timeout",
       [](const httplib::Request&, httplib::Response& res) {
         std::this_thread::sleep_for(std::chrono::milliseconds(400));
         res.set_content("{}", "application/json");
       }},
      {"http-error", [](const httplib::Request&, httplib::Response& res) { res.status = 503; }},
      {"not-json", [](const httplib::Request&, httplib::Response& res) { res.set_content("<html>", "text/html"); }},
      {"malformed", reply("here are some ideas: go, get")},
      {"wrong-arity", reply(R"({"words":["a","b","c","d","e","f","g","h"],"sentences":["x","y","z"]})")},
      {"too-few", reply(R"({"words":["go"]})")},
      {"prefix-violations", reply(R"({"words":["zebra","yak","xylophone"],"sentences":["q","r"]})")},
  };
  LlmConfig llm;
  llm.endpoint = ep.url();
  llm.timeout_s = 0.15;
  llm.max_retries = 0;
  llm.backoff_s = 0.0;
  SuggesterSetup setup;
  setup.lexicon = Lexicon();
  setup.llm = llm;
  const auto factory = MakeSuggesterFactory(SimMode::kLlm, setup);

  DialogueItem item;
  item.id = "robustness";
  item.category = Category::kMtDaily;
  item.turns = {{"A", "Are you free tonight?"}, {"B", "Yes, what's up?"}};
  item.target_index = 1;
  const auto suggester = factory(item);

  int calls = 0, invalid = 0, aborted = 0;
  const std::vector<std::string> texts = {"", "yes, wh", "yes, what's ", "g"};
  for (const auto& [name, handler] : faults) {
    ep.Set(handler);
    for (const auto& text : texts) {
      ++calls;
      try {
        SuggestionRequest req{text + name, item.context(), "MT-daily"};
        const SuggestionResult r = suggester->Suggest(req);
        const SuggestMode mode = ModeOf(req.current_text);
        for (const auto& w : r.set.words) {
          if (w.find('\n') != std::string::npos) ++invalid;
          if (!w.empty() && mode.kind == SuggestMode::Kind::kWordCompletion &&
              !StartsWithIgnoreCase(w, mode.prefix)) {
            ++invalid;
          }
        }
        for (const auto& s : r.set.sentences) invalid += s.find('\n') != std::string::npos;
      } catch (...) {
        ++aborted;
      }
    }
  }
  // A whole utterance under rotating faults still finishes.
  int turn = 0;
  ep.Set([&](const httplib::Request& req, httplib::Response& res) {
    faults[turn++ % faults.size()].second(req, res);
  });
  SimConfig cfg;
  cfg.mode = SimMode::kLlm;
  cfg.record_trace = false;
  bool completed = false;
  try {
    completed = SimulateUtterance(item, cfg, *suggester).completed;
  } catch (...) {
    ++aborted;
  }
  return Check(invalid == 0 && aborted == 0 && completed,
               Fmt("%zu fault kinds x %zu states: %d calls, %d invalid sets, %d aborts; "
                   "full utterance under rotating faults %s",
                   faults.size(), texts.size(), calls, invalid, aborted,
                   completed ? "completed" : "did not complete"));
}

Verdict DatasetIntegrity() {
  const auto loaded = LoadDataset(kData / "sample_dialogues.jsonl");
  const auto& items = loaded.items;
  int untypeable = 0;
  for (const auto& item : items) {
    for (char c : item.target()) untypeable += !IsSupportedChar(c);
  }
  const std::size_t half = items.size() / 2;
  DatasetStats parts = ComputeStats({items.begin(), items.begin() + static_cast<long>(half)});
  parts += ComputeStats({items.begin() + static_cast<long>(half), items.end()});
  const DatasetStats whole = ComputeStats(items);
  const bool additive = parts.total().utterances == whole.total().utterances &&
                        parts.total().words == whole.total().words &&
                        parts.total().characters == whole.total().characters;
  std::stringstream buf;
  WriteDataset(buf, items);
  const auto again = ParseDataset(buf, "round-trip");
  bool round_trip = again.rejected.empty() && again.items.size() == items.size();
  for (std::size_t i = 0; round_trip && i < items.size(); ++i) {
    round_trip = ItemToJson(again.items[i]) == ItemToJson(items[i]);
  }
  const bool ok = loaded.rejected.empty() && untypeable == 0 && additive && round_trip;
  std::string detail = Fmt("%zu items, %d untypeable chars, additivity %s, round-trip %s", items.size(),
                           untypeable, additive ? "ok" : "broken", round_trip ? "ok" : "broken");

  const fs::path full = kData / "full_dialogues.jsonl";
  if (!fs::exists(full)) {
    return {ok ? Status::kSkip : Status::kFail,
            detail + "; full 200-item set not reconstructed (" + full.filename().string() +
                " absent), per-category count check skipped"};
  }
  const auto stats = ComputeStats(LoadDataset(full).items);
  bool fifty = true;
  for (Category c : kAllCategories) fifty &= stats.per_category.at(c).utterances == 50;
  return Check(ok && fifty, detail + Fmt("; full set %zu items, 50 per category %s",
                                         stats.total().utterances, fifty ? "ok" : "violated"));
}

}  // namespace
}  // namespace mindchat

int main() {
  using namespace mindchat;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"naive_exactness", NaiveExactness},
      {"golden_trace_replay", GoldenReplay},
      {"keystroke_savings", KeystrokeSavings},
      {"context_benefit", ContextBenefit},
      {"error_model_calibration", ErrorModelCalibration},
      {"decoder_correctness", DecoderCorrectness},
      {"suggestion_robustness", SuggestionRobustness},
      {"dataset_integrity", DatasetIntegrity},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = v.status == Status::kPass ? "PASS" : v.status == Status::kSkip ? "SKIP" : "FAIL";
    failures += v.status == Status::kFail;
    std::printf("%s %s (%.1f s): %s\n", tag, name, secs, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
