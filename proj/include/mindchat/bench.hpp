#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindchat/decoders.hpp"
#include "mindchat/signal.hpp"

namespace mindchat {

// Raw trial for `key` run through the decoding front end.
EegTrial PreprocessedTrial(KeyId key, const SynthConfig& cfg, std::uint64_t seed);

// `per_class` trials for every key; seeds derived from `base_seed`.
std::vector<LabeledTrial> LabeledSet(const SynthConfig& cfg, int per_class,
                                     std::uint64_t base_seed);

// `count` trials with keys drawn uniformly from a seeded generator.
std::vector<LabeledTrial> RandomKeySet(const SynthConfig& cfg, int count,
                                       std::uint64_t base_seed);

struct BenchConfig {
  int subjects = 10;
  std::vector<Algorithm> methods = {Algorithm::kFbscca, Algorithm::kFbecca,
                                    Algorithm::kFbdsp, Algorithm::kFbtrca};
  double snr_db = -12.0;
  NoiseKind noise = NoiseKind::kPink;
  int train_per_class = 10;
  int test_trials = 100;
  int n_bands = kDefaultBands;
  int harmonics = kDefaultHarmonics;
  std::uint64_t seed = 1;
};

// Throws Error(kInvalidConfig).
void ValidateBenchConfig(const BenchConfig& cfg);

// Per-subject synthesis: own mixing matrix and phase draw, shared SNR.
SynthConfig SubjectSynth(const BenchConfig& cfg, int subject);

// FBSCCA ignores `train`; the others need at least two trials per class.
DecoderModel TrainDecoder(Algorithm method, const std::vector<LabeledTrial>& train,
                          Eigen::Index samples, int n_bands = kDefaultBands,
                          int harmonics = kDefaultHarmonics);

struct BenchRow {
  int subject = 0;
  std::uint64_t seed = 0;
  std::vector<double> accuracy;  // aligned with BenchReport::methods
};

struct BenchReport {
  std::vector<Algorithm> methods;
  std::vector<BenchRow> rows;
  std::vector<double> Average() const;
};

using BenchProgress = std::function<void(int subject, Algorithm method, double accuracy)>;

BenchReport RunDecodeBench(const BenchConfig& cfg, const BenchProgress& progress = {});

struct Calibration {
  double snr_db = 0.0;
  double accuracy = 0.0;
  int iterations = 0;
};

// Bisects cfg.snr_db on [lo_db, hi_db] until `method`'s mean accuracy lands in
// [target_lo, target_hi]. Accuracy is assumed increasing in SNR. Throws
// Error(kInvalidConfig) when the bracket does not contain the band or the
// iteration budget runs out.
Calibration CalibrateSnr(BenchConfig cfg, Algorithm method, double target_lo, double target_hi,
                         double lo_db, double hi_db, int max_iterations = 12);

// subject,<method...> in percent, one row per subject plus "Avg".
void WriteBenchCsv(std::ostream& out, const BenchReport& report);
void WriteBenchCsv(const std::filesystem::path& path, const BenchReport& report);
nlohmann::json BenchReportToJson(const BenchReport& report);

}  // namespace mindchat
