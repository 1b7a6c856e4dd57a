#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mindchat/cca.hpp"
#include "mindchat/keyboard.hpp"
#include "mindchat/signal.hpp"

namespace mindchat {

enum class Algorithm { kFbscca, kFbecca, kFbdsp, kFbtrca };

std::string_view AlgorithmName(Algorithm algorithm);
Algorithm ParseAlgorithm(std::string_view name);

inline constexpr int kDefaultBands = 5;
inline constexpr int kDefaultHarmonics = 5;
inline constexpr double kRegularization = 1e-6;

// w(m) = m^-1.25 + 0.25 for m = 1..n_bands.
std::vector<double> DefaultBandWeights(int n_bands);

// Sin/cos pairs at h*f with phase h*phi, h = 1..harmonics: (2*harmonics) x samples.
Eigen::MatrixXd ReferenceSignals(const StimulusSpec& stim, int harmonics,
                                 Eigen::Index samples, double sample_rate);

struct LabeledTrial {
  EegTrial trial;
  KeyId label{1};
};

// Class-averaged training trials.
struct TrialTemplates {
  std::vector<Eigen::MatrixXd> means;  // aligned with DecoderModel::classes
  std::vector<int> trial_counts;
};

struct DecoderModel {
  Algorithm algorithm = Algorithm::kFbscca;
  double sample_rate = kDecodeSampleRate;
  Eigen::Index samples = 0;
  int harmonics = kDefaultHarmonics;
  std::vector<FilterSpec> bank;
  std::vector<double> weights;
  std::vector<KeyId> classes;
  std::vector<StimulusSpec> stimuli;  // aligned with classes
  std::optional<TrialTemplates> templates;
  // DSP: one channels x components matrix per band.
  // TRCA: one channels x classes matrix per band (column k = class k's filter).
  std::vector<Eigen::MatrixXd> spatial_filters;
  bool trca_ensemble = false;
};

struct DecodeResult {
  KeyId predicted{1};
  std::vector<double> scores;  // aligned with DecoderModel::classes
};

// Throws Error(kInvalidConfig) when invariants are broken.
void ValidateModel(const DecoderModel& model);

// All 40 keys of the canonical layout as classes.
DecoderModel MakeFbsccaModel(double sample_rate, Eigen::Index samples,
                             int n_bands = kDefaultBands, int harmonics = kDefaultHarmonics);

// Averages trials per class. Throws Error(kInsufficientTrainingData) when a
// listed class has no trial.
TrialTemplates BuildTemplates(const std::vector<LabeledTrial>& trials,
                              const std::vector<KeyId>& classes);

DecoderModel MakeFbeccaModel(TrialTemplates templates, double sample_rate,
                             Eigen::Index samples, int n_bands = kDefaultBands,
                             int harmonics = kDefaultHarmonics);

struct DspOptions {
  int components = 5;
};

// Discriminative spatial patterns: per band, leading generalized eigenvectors
// of between-class vs within-class scatter.
DecoderModel FbdspTrain(const std::vector<LabeledTrial>& trials,
                        const std::vector<FilterSpec>& bank, int harmonics = kDefaultHarmonics,
                        DspOptions options = {});

struct TrcaOptions {
  bool ensemble = false;
};

// Task-related component analysis: per class and band, the filter maximizing
// inter-trial covariance relative to total covariance.
DecoderModel FbtrcaTrain(const std::vector<LabeledTrial>& trials,
                         const std::vector<FilterSpec>& bank, TrcaOptions options = {});

// Precomputes filters, reference subspaces and filtered templates so repeated
// classification only filters the test trial. Immutable once built.
class Decoder {
 public:
  explicit Decoder(DecoderModel model);

  const DecoderModel& model() const { return model_; }

  // Ties resolve to the lowest class index.
  DecodeResult Classify(const EegTrial& trial) const;

 private:
  std::vector<double> ScoresFbscca(const std::vector<Eigen::MatrixXd>& bands) const;
  std::vector<double> ScoresFbecca(const std::vector<Eigen::MatrixXd>& bands) const;
  std::vector<double> ScoresProjected(const std::vector<Eigen::MatrixXd>& bands) const;

  DecoderModel model_;
  std::vector<SosFilter> filters_;
  std::vector<CcaSubspace> references_;
  // [band][class]
  std::vector<std::vector<Eigen::MatrixXd>> filtered_templates_;
  std::vector<std::vector<CcaSubspace>> template_subspaces_;
  std::vector<std::vector<Eigen::MatrixXd>> projected_templates_;
};

DecodeResult FbsccaClassify(const EegTrial& trial, const DecoderModel& model);
DecodeResult FbeccaClassify(const EegTrial& trial, const DecoderModel& model);
DecodeResult FbdspClassify(const EegTrial& trial, const DecoderModel& model);
DecodeResult FbtrcaClassify(const EegTrial& trial, const DecoderModel& model);

// Fraction of trials whose prediction equals the label.
// Throws Error(kEmptySet).
double EvaluateAccuracy(const Decoder& decoder, const std::vector<LabeledTrial>& trials);

nlohmann::json ModelToJson(const DecoderModel& model);
DecoderModel ModelFromJson(const nlohmann::json& doc);
void SaveModel(const std::filesystem::path& path, const DecoderModel& model);
DecoderModel LoadModel(const std::filesystem::path& path);

}  // namespace mindchat
