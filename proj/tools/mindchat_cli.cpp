#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mindchat/bench.hpp"
#include "mindchat/dataset.hpp"
#include "mindchat/error.hpp"
#include "mindchat/service.hpp"
#include "mindchat/sim.hpp"

namespace fs = std::filesystem;
using namespace mindchat;

namespace {

const std::string kDataDir = MINDCHAT_DEFAULT_DATA_DIR;

struct LlmFlags {
  std::string endpoint = LlmConfig{}.endpoint;
  std::string model = LlmConfig{}.model;
  double timeout_s = LlmConfig{}.timeout_s;
  int retries = LlmConfig{}.max_retries;
  std::string fixtures;
  bool record = false;

  void Register(CLI::App* cmd) {
    cmd->add_option("--llm-endpoint", endpoint, "OpenAI-compatible base URL")->capture_default_str();
    cmd->add_option("--llm-model", model, "Chat model")->capture_default_str();
    cmd->add_option("--llm-timeout", timeout_s, "Per-request timeout in seconds")->capture_default_str();
    cmd->add_option("--llm-retries", retries, "Retries after the first attempt")->capture_default_str();
    cmd->add_option("--llm-fixtures", fixtures, "Reply fixture file (replayed unless --llm-record)");
    cmd->add_flag("--llm-record", record, "Call the endpoint and record replies into --llm-fixtures");
  }

  void Apply(SuggesterSetup& setup) const {
    LlmConfig cfg;
    cfg.endpoint = endpoint;
    cfg.model = model;
    cfg.timeout_s = timeout_s;
    cfg.max_retries = retries;
    ValidateLlmConfig(cfg);
    setup.llm = cfg;
    if (!fixtures.empty()) {
      setup.fixtures = std::make_shared<FixtureStore>(
          fixtures, record ? FixtureStore::Mode::kRecord : FixtureStore::Mode::kReplay);
    }
  }
};

std::vector<DialogueItem> LoadItems(const std::string& path) {
  LoadedDataset loaded = LoadDataset(path);
  for (const auto& r : loaded.rejected) {
    std::cerr << path << ':' << r.line << ": skipped " << (r.id.empty() ? "record" : r.id) << ": "
              << r.message << '\n';
  }
  if (loaded.items.empty()) throw Error(ErrorCode::kEmptySet, "no usable items in " + path);
  return std::move(loaded.items);
}

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

void AddTimeOptions(CLI::App* cmd, TimeModel& tm) {
  cmd->add_option("--t-shift", tm.t_shift, "Gaze shift time per trial (s)")->capture_default_str();
  cmd->add_option("--t-stim", tm.t_stim, "Stimulation time per trial (s)")->capture_default_str();
  cmd->add_option("--t-decide", tm.t_decide, "Extra decision time on assisted trials (s)")->capture_default_str();
  cmd->add_option("--t-llm", tm.t_llm, "Suggestion latency (s)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copy-spelling simulator, SSVEP decoder bench and speller service"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file; sections are named after subcommands");
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Seed for every random draw")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Replay the dataset through the simulated speller");
  std::string sim_dataset = kDataDir + "/sample_dialogues.jsonl";
  std::string sim_words = kDataDir + "/word_freq.tsv";
  std::vector<std::string> sim_modes = {"naive", "dwg", "oracle"};
  std::string sim_out;
  SimConfig sim_cfg;
  OracleProfile oracle_st{1, 3};
  std::optional<int> oracle_s_mt;
  bool sim_traces = false;
  LlmFlags sim_llm;
  sim->add_option("--dataset", sim_dataset, "Dialogue JSONL")->capture_default_str();
  sim->add_option("--words", sim_words, "Word frequency TSV for the trie")->capture_default_str();
  sim->add_option("--mode", sim_modes, "Suggestion modes: naive, dwg, oracle, llm")
      ->capture_default_str()
      ->check(CLI::IsMember({"naive", "dwg", "oracle", "llm"}));
  sim->add_option("--out", sim_out, "Output directory for report.csv/report.json (stdout CSV if unset)");
  sim->add_option("-p,--accuracy", sim_cfg.accuracy_p, "Per-trial decoding accuracy")->capture_default_str();
  sim->add_option("--runs", sim_cfg.monte_carlo_runs, "Monte Carlo runs per item")->capture_default_str();
  sim->add_flag("--shortcut", sim_cfg.policy.shortcut_enabled, "Let the planner take overshooting suggestions");
  sim->add_flag("--pipelined", sim_cfg.pipelined, "Overlap suggestion fetches with the next trial");
  sim->add_flag("--traces", sim_traces, "Also write traces.jsonl (needs --out)");
  sim->add_option("--oracle-w", oracle_st.word_after, "Oracle offers the word after this many letters")->capture_default_str();
  sim->add_option("--oracle-s", oracle_st.sentence_after, "Oracle offers the sentence after this many characters")->capture_default_str();
  sim->add_option("--oracle-s-mt", oracle_s_mt, "Sentence threshold for multi-turn items (default --oracle-s)");
  AddTimeOptions(sim, sim_cfg.time);
  sim_llm.Register(sim);

  // decode-bench
  auto* bench = app.add_subcommand("decode-bench", "Train and score the four decoders on synthetic subjects");
  BenchConfig bench_cfg;
  std::vector<std::string> bench_methods = {"FBSCCA", "FBECCA", "FBDSP", "FBTRCA"};
  std::string bench_noise = "pink";
  std::string bench_out;
  std::string bench_json;
  std::string calibrate;
  std::vector<double> target = {0.86, 0.92};
  std::vector<double> bracket = {-30.0, 0.0};
  bench->add_option("--subjects", bench_cfg.subjects)->capture_default_str();
  bench->add_option("--mode,--methods", bench_methods, "Decoders to run")
      ->capture_default_str()
      ->check(CLI::IsMember({"FBSCCA", "FBECCA", "FBDSP", "FBTRCA"}));
  bench->add_option("--snr", bench_cfg.snr_db, "Synthetic SNR in dB")->capture_default_str();
  bench->add_option("--noise", bench_noise, "Noise colour")->capture_default_str()->check(CLI::IsMember({"pink", "white"}));
  bench->add_option("--train-per-class", bench_cfg.train_per_class)->capture_default_str();
  bench->add_option("--test-trials", bench_cfg.test_trials, "Held-out trials per subject")->capture_default_str();
  bench->add_option("--bands", bench_cfg.n_bands)->capture_default_str();
  bench->add_option("--harmonics", bench_cfg.harmonics)->capture_default_str();
  bench->add_option("--out", bench_out, "CSV path (stdout if unset)");
  bench->add_option("--json", bench_json, "Also write the report as JSON");
  bench->add_option("--calibrate", calibrate, "Bisect --snr so this method lands in --target")
      ->check(CLI::IsMember({"FBSCCA", "FBECCA", "FBDSP", "FBTRCA"}));
  bench->add_option("--target", target, "Accuracy band for --calibrate")->expected(2)->capture_default_str();
  bench->add_option("--bracket", bracket, "SNR search range in dB for --calibrate")->expected(2)->capture_default_str();

  // dataset-stats
  auto* stats = app.add_subcommand("dataset-stats", "Per-category utterance, word and character counts");
  std::string stats_dataset = kDataDir + "/sample_dialogues.jsonl";
  std::string stats_out;
  stats->add_option("--dataset", stats_dataset)->capture_default_str();
  stats->add_option("--out", stats_out, "CSV path (stdout if unset)");

  // serve
  auto* serve = app.add_subcommand("serve", "WebSocket speller service plus static files");
  ServiceConfig svc;
  std::string serve_mode = "dwg";
  std::string serve_words = kDataDir + "/word_freq.tsv";
  std::string serve_static;
  LlmFlags serve_llm;
  bool serve_llm_enabled = false;
  serve->add_option("--bind", svc.bind_address)->capture_default_str();
  serve->add_option("--port", svc.port, "0 picks a free port")->capture_default_str();
  serve->add_option("--mode", serve_mode, "Default suggestion mode")
      ->capture_default_str()
      ->check(CLI::IsMember({"naive", "dwg", "oracle", "llm"}));
  serve->add_option("-p,--accuracy", svc.accuracy_p, "Simulated decoder accuracy")->capture_default_str();
  serve->add_option("--words", serve_words)->capture_default_str();
  serve->add_option("--static", serve_static, "Directory with the built web UI");
  serve->add_flag("--llm", serve_llm_enabled, "Enable the llm mode");
  AddTimeOptions(serve, svc.time);
  serve_llm.Register(serve);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      sim_cfg.seed = seed;
      ValidateSimConfig(sim_cfg);
      const auto items = LoadItems(sim_dataset);
      SuggesterSetup setup;
      setup.lexicon = std::make_shared<const TrieLexicon>(TrieLexicon::Build(LoadWordFrequencyTsv(sim_words)));
      setup.oracle_single_turn = oracle_st;
      setup.oracle_multi_turn = {oracle_st.word_after, oracle_s_mt.value_or(oracle_st.sentence_after)};
      bool wants_llm = false;
      for (const auto& m : sim_modes) wants_llm |= m == "llm";
      if (wants_llm) sim_llm.Apply(setup);

      std::vector<UtteranceResult> results;
      for (const auto& name : sim_modes) {
        SimConfig cfg = sim_cfg;
        cfg.mode = ParseSimMode(name);
        cfg.record_trace = sim_traces;
        auto part = RunSimulation(items, cfg, MakeSuggesterFactory(cfg.mode, setup));
        results.insert(results.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
      }
      if (setup.fixtures && setup.fixtures->mode() == FixtureStore::Mode::kRecord) setup.fixtures->Save();
      const auto rows = Aggregate(results);
      if (sim_out.empty()) {
        WriteReportCsv(std::cout, rows);
      } else {
        fs::create_directories(sim_out);
        auto csv = OpenOut(fs::path(sim_out) / "report.csv");
        WriteReportCsv(csv, rows);
        OpenOut(fs::path(sim_out) / "report.json") << ReportToJson(rows).dump(2) << '\n';
        if (sim_traces) {
          auto traces = OpenOut(fs::path(sim_out) / "traces.jsonl");
          WriteTracesJsonl(traces, results);
        }
      }
      int aborted = 0;
      for (const auto& r : results) aborted += r.aborted;
      if (aborted > 0) std::cerr << "warning: " << aborted << " utterances hit the keystroke guard\n";
    } else if (bench->parsed()) {
      bench_cfg.seed = seed;
      bench_cfg.noise = bench_noise == "white" ? NoiseKind::kWhite : NoiseKind::kPink;
      bench_cfg.methods.clear();
      for (const auto& m : bench_methods) bench_cfg.methods.push_back(ParseAlgorithm(m));
      if (!calibrate.empty()) {
        const Calibration c = CalibrateSnr(bench_cfg, ParseAlgorithm(calibrate), target[0], target[1],
                                           bracket[0], bracket[1]);
        std::printf("method=%s snr_db=%.4f accuracy=%.4f iterations=%d seed=%llu\n", calibrate.c_str(),
                    c.snr_db, c.accuracy, c.iterations, static_cast<unsigned long long>(seed));
        return 0;
      }
      const BenchReport report = RunDecodeBench(bench_cfg, [](int s, Algorithm m, double acc) {
        std::cerr << 'S' << s << ' ' << AlgorithmName(m) << ' ' << acc << '\n';
      });
      if (bench_out.empty()) {
        WriteBenchCsv(std::cout, report);
      } else {
        WriteBenchCsv(fs::path(bench_out), report);
      }
      if (!bench_json.empty()) OpenOut(bench_json) << BenchReportToJson(report).dump(2) << '\n';
    } else if (stats->parsed()) {
      const DatasetStats ds = ComputeStats(LoadItems(stats_dataset));
      if (stats_out.empty()) {
        WriteStatsCsv(std::cout, ds);
      } else {
        auto out = OpenOut(stats_out);
        WriteStatsCsv(out, ds);
      }
    } else if (serve->parsed()) {
      svc.seed = seed;
      svc.mode = ParseSimMode(serve_mode);
      svc.static_dir = serve_static;
      svc.suggesters.lexicon =
          std::make_shared<const TrieLexicon>(TrieLexicon::Build(LoadWordFrequencyTsv(serve_words)));
      if (serve_llm_enabled || svc.mode == SimMode::kLlm) serve_llm.Apply(svc.suggesters);
      Server server(svc);
      std::cerr << "listening on ws://" << svc.bind_address << ':' << server.port() << "/\n";
      server.Run(/*handle_signals=*/true);
      if (svc.suggesters.fixtures && svc.suggesters.fixtures->mode() == FixtureStore::Mode::kRecord) {
        svc.suggesters.fixtures->Save();
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
