#include "mindchat/bench.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "mindchat/error.hpp"
#include "mindchat/sim.hpp"

namespace mindchat {

EegTrial PreprocessedTrial(KeyId key, const SynthConfig& cfg, std::uint64_t seed) {
  return Preprocess(SynthTrial(CanonicalLayout().key(key).stimulus, cfg, seed));
}

std::vector<LabeledTrial> LabeledSet(const SynthConfig& cfg, int per_class,
                                     std::uint64_t base_seed) {
  std::vector<LabeledTrial> out;
  out.reserve(static_cast<std::size_t>(kNumKeys * per_class));
  for (int key = 1; key <= kNumKeys; ++key) {
    for (int i = 0; i < per_class; ++i) {
      const std::uint64_t seed =
          base_seed * 1000003ULL + static_cast<std::uint64_t>(key) * 1009 + i;
      out.push_back({PreprocessedTrial(KeyId(key), cfg, seed), KeyId(key)});
    }
  }
  return out;
}

std::vector<LabeledTrial> RandomKeySet(const SynthConfig& cfg, int count,
                                       std::uint64_t base_seed) {
  std::mt19937_64 rng(base_seed);
  std::uniform_int_distribution<int> pick(1, kNumKeys);
  std::vector<LabeledTrial> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int key = pick(rng);
    out.push_back({PreprocessedTrial(KeyId(key), cfg, rng()), KeyId(key)});
  }
  return out;
}

void ValidateBenchConfig(const BenchConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (cfg.subjects < 1) fail("subjects must be >= 1");
  if (cfg.methods.empty()) fail("no methods selected");
  if (cfg.test_trials < 1) fail("test_trials must be >= 1");
  if (cfg.n_bands < 1) fail("n_bands must be >= 1");
  if (cfg.harmonics < 1) fail("harmonics must be >= 1");
  for (Algorithm m : cfg.methods) {
    if (m != Algorithm::kFbscca && cfg.train_per_class < 2) {
      fail(std::string(AlgorithmName(m)) + " needs train_per_class >= 2");
    }
  }
}

SynthConfig SubjectSynth(const BenchConfig& cfg, int subject) {
  SynthConfig synth = DefaultSynthConfig(DeriveSeed(cfg.seed, 0x5b1ec7, subject));
  synth.snr_db = cfg.snr_db;
  synth.noise_kind = cfg.noise;
  synth.harmonics = cfg.harmonics;
  return synth;
}

DecoderModel TrainDecoder(Algorithm method, const std::vector<LabeledTrial>& train,
                          Eigen::Index samples, int n_bands, int harmonics) {
  DecoderModel base = MakeFbsccaModel(kDecodeSampleRate, samples, n_bands, harmonics);
  switch (method) {
    case Algorithm::kFbscca:
      return base;
    case Algorithm::kFbecca:
      return MakeFbeccaModel(BuildTemplates(train, base.classes), kDecodeSampleRate, samples,
                             n_bands, harmonics);
    case Algorithm::kFbdsp:
      return FbdspTrain(train, DesignFilterBank(n_bands, kDecodeSampleRate), harmonics);
    case Algorithm::kFbtrca:
      return FbtrcaTrain(train, DesignFilterBank(n_bands, kDecodeSampleRate));
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown method");
}

std::vector<double> BenchReport::Average() const {
  std::vector<double> avg(methods.size(), 0.0);
  if (rows.empty()) return avg;
  for (const auto& row : rows) {
    for (std::size_t m = 0; m < avg.size(); ++m) avg[m] += row.accuracy[m];
  }
  for (double& a : avg) a /= static_cast<double>(rows.size());
  return avg;
}

BenchReport RunDecodeBench(const BenchConfig& cfg, const BenchProgress& progress) {
  ValidateBenchConfig(cfg);
  bool needs_training = false;
  for (Algorithm m : cfg.methods) needs_training |= m != Algorithm::kFbscca;

  BenchReport report;
  report.methods = cfg.methods;
  for (int s = 1; s <= cfg.subjects; ++s) {
    const SynthConfig synth = SubjectSynth(cfg, s);
    BenchRow row;
    row.subject = s;
    row.seed = DeriveSeed(cfg.seed, 0x7e57, s);
    const auto test = RandomKeySet(synth, cfg.test_trials, row.seed);
    std::vector<LabeledTrial> train;
    if (needs_training) train = LabeledSet(synth, cfg.train_per_class, DeriveSeed(cfg.seed, 0x7a1, s));
    for (Algorithm m : cfg.methods) {
      const Decoder decoder(
          TrainDecoder(m, train, test.front().trial.samples(), cfg.n_bands, cfg.harmonics));
      const double acc = EvaluateAccuracy(decoder, test);
      row.accuracy.push_back(acc);
      if (progress) progress(s, m, acc);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

Calibration CalibrateSnr(BenchConfig cfg, Algorithm method, double target_lo, double target_hi,
                         double lo_db, double hi_db, int max_iterations) {
  if (!(target_lo < target_hi) || !(lo_db < hi_db)) {
    throw Error(ErrorCode::kInvalidConfig, "empty calibration bracket");
  }
  cfg.methods = {method};
  auto accuracy_at = [&](double snr) {
    cfg.snr_db = snr;
    return RunDecodeBench(cfg).Average().front();
  };
  const double lo_acc = accuracy_at(lo_db);
  const double hi_acc = accuracy_at(hi_db);
  if (lo_acc > target_hi || hi_acc < target_lo) {
    throw Error(ErrorCode::kInvalidConfig, "target band outside the SNR bracket");
  }
  if (lo_acc >= target_lo) return {lo_db, lo_acc, 0};
  if (hi_acc <= target_hi) return {hi_db, hi_acc, 0};
  const double target = 0.5 * (target_lo + target_hi);
  for (int it = 1; it <= max_iterations; ++it) {
    const double mid = 0.5 * (lo_db + hi_db);
    const double acc = accuracy_at(mid);
    if (acc >= target_lo && acc <= target_hi) return {mid, acc, it};
    (acc < target ? lo_db : hi_db) = mid;
  }
  throw Error(ErrorCode::kInvalidConfig, "calibration did not converge");
}

namespace {

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

}  // namespace

void WriteBenchCsv(std::ostream& out, const BenchReport& report) {
  out << "subject";
  for (Algorithm m : report.methods) out << ',' << AlgorithmName(m);
  out << '\n';
  for (const auto& row : report.rows) {
    out << 'S' << row.subject;
    for (double a : row.accuracy) out << ',' << Percent(a);
    out << '\n';
  }
  out << "Avg";
  for (double a : report.Average()) out << ',' << Percent(a);
  out << '\n';
}

void WriteBenchCsv(const std::filesystem::path& path, const BenchReport& report) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  WriteBenchCsv(out, report);
}

nlohmann::json BenchReportToJson(const BenchReport& report) {
  nlohmann::json j;
  for (Algorithm m : report.methods) j["methods"].push_back(AlgorithmName(m));
  j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    j["rows"].push_back({{"subject", row.subject}, {"seed", row.seed}, {"accuracy", row.accuracy}});
  }
  j["average"] = report.Average();
  return j;
}

}  // namespace mindchat
