#include "mindchat/decoders.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "mindchat/error.hpp"

namespace mindchat {
namespace {

double SignedSquare(double r) { return r < 0.0 ? -r * r : r * r; }

Eigen::MatrixXd CenterRows(const Eigen::MatrixXd& x) {
  return x.colwise() - x.rowwise().mean();
}

// Regularized copy of a PSD matrix: adds eps * trace / C on the diagonal.
// Falls back to `fallback_trace` when the matrix itself has zero trace.
std::optional<Eigen::MatrixXd> Regularized(const Eigen::MatrixXd& m, double fallback_trace) {
  double trace = m.trace();
  if (!(trace > 0.0)) trace = fallback_trace;
  if (!(trace > 0.0)) return std::nullopt;
  const auto c = static_cast<double>(m.rows());
  return m + (kRegularization * trace / c) *
                 Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

std::vector<StimulusSpec> StimuliFor(const std::vector<KeyId>& classes) {
  std::vector<StimulusSpec> stimuli;
  stimuli.reserve(classes.size());
  for (KeyId k : classes) stimuli.push_back(CanonicalLayout().key(k).stimulus);
  return stimuli;
}

std::vector<KeyId> AllKeys() {
  std::vector<KeyId> keys;
  for (int i = 1; i <= kNumKeys; ++i) keys.emplace_back(i);
  return keys;
}

void CheckTrialShapes(const std::vector<LabeledTrial>& trials) {
  const EegTrial& first = trials.front().trial;
  for (const LabeledTrial& t : trials) {
    if (t.trial.channels() != first.channels() || t.trial.samples() != first.samples() ||
        t.trial.sample_rate != first.sample_rate) {
      throw Error(ErrorCode::kShapeMismatch, "training trials differ in shape or rate");
    }
  }
}

// Labels grouped per class in ascending key order.
std::map<KeyId, std::vector<const EegTrial*>> GroupByClass(
    const std::vector<LabeledTrial>& trials) {
  std::map<KeyId, std::vector<const EegTrial*>> groups;
  for (const LabeledTrial& t : trials) groups[t.label].push_back(&t.trial);
  return groups;
}

std::vector<SosFilter> BankFilters(const std::vector<FilterSpec>& bank, double fs) {
  std::vector<SosFilter> filters;
  filters.reserve(bank.size());
  for (const FilterSpec& spec : bank) filters.push_back(DesignBandpass(spec, fs));
  return filters;
}

Eigen::MatrixXd FilterRows(const SosFilter& filter, const Eigen::MatrixXd& x, bool zero_phase) {
  return ApplyFilter(EegTrial{x, 0.0}, filter, zero_phase).data;
}

nlohmann::json MatrixToJson(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd MatrixFromJson(const nlohmann::json& rows) {
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = n_rows ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != n_cols) {
      throw Error(ErrorCode::kSchemaError, "ragged matrix");
    }
    for (Eigen::Index c = 0; c < n_cols; ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

}  // namespace

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kFbscca: return "FBSCCA";
    case Algorithm::kFbecca: return "FBECCA";
    case Algorithm::kFbdsp: return "FBDSP";
    case Algorithm::kFbtrca: return "FBTRCA";
  }
  return "unknown";
}

Algorithm ParseAlgorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kFbscca, Algorithm::kFbecca, Algorithm::kFbdsp,
                      Algorithm::kFbtrca}) {
    if (AlgorithmName(a) == name) return a;
  }
  throw Error(ErrorCode::kSchemaError, "unknown algorithm " + std::string(name));
}

std::vector<double> DefaultBandWeights(int n_bands) {
  std::vector<double> w;
  for (int m = 1; m <= n_bands; ++m) w.push_back(std::pow(m, -1.25) + 0.25);
  return w;
}

Eigen::MatrixXd ReferenceSignals(const StimulusSpec& stim, int harmonics,
                                 Eigen::Index samples, double sample_rate) {
  Eigen::MatrixXd y(2 * harmonics, samples);
  for (int h = 1; h <= harmonics; ++h) {
    for (Eigen::Index n = 0; n < samples; ++n) {
      const double arg = 2.0 * std::numbers::pi * h * stim.frequency_hz *
                             (static_cast<double>(n) / sample_rate) +
                         h * stim.phase_rad;
      y(2 * (h - 1), n) = std::sin(arg);
      y(2 * (h - 1) + 1, n) = std::cos(arg);
    }
  }
  return y;
}

void ValidateModel(const DecoderModel& m) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidConfig, why); };
  if (m.samples < 2) fail("model needs >= 2 samples");
  if (m.harmonics < 1) fail("harmonics must be >= 1");
  if (m.bank.empty()) fail("empty filter bank");
  if (m.weights.size() != m.bank.size()) fail("one weight per band required");
  for (double w : m.weights) {
    if (!(w > 0.0)) fail("band weights must be strictly positive");
  }
  for (const FilterSpec& spec : m.bank) ValidateFilterSpec(spec, m.sample_rate);
  if (m.classes.empty() || m.stimuli.size() != m.classes.size()) {
    fail("stimuli must align with classes");
  }
  const bool needs_templates = m.algorithm != Algorithm::kFbscca;
  if (needs_templates) {
    if (!m.templates) throw Error(ErrorCode::kMissingTemplates, "algorithm needs templates");
    if (m.templates->means.size() != m.classes.size() ||
        m.templates->trial_counts.size() != m.classes.size()) {
      fail("templates must align with classes");
    }
    for (std::size_t k = 0; k < m.classes.size(); ++k) {
      if (m.templates->trial_counts[k] < 1) fail("template trial_count must be >= 1");
      if (m.templates->means[k].cols() != m.samples) fail("template length mismatch");
      if (m.templates->means[k].rows() != m.templates->means.front().rows()) {
        fail("template channel mismatch");
      }
    }
  }
  if (m.algorithm == Algorithm::kFbdsp || m.algorithm == Algorithm::kFbtrca) {
    if (m.spatial_filters.size() != m.bank.size()) fail("one spatial filter set per band");
    const auto channels = m.templates->means.front().rows();
    for (const Eigen::MatrixXd& w : m.spatial_filters) {
      if (w.rows() != channels || w.cols() < 1) fail("spatial filter shape");
      if (m.algorithm == Algorithm::kFbtrca &&
          w.cols() != static_cast<Eigen::Index>(m.classes.size())) {
        fail("TRCA needs one filter per class");
      }
    }
  }
}

DecoderModel MakeFbsccaModel(double sample_rate, Eigen::Index samples, int n_bands,
                             int harmonics) {
  DecoderModel model;
  model.algorithm = Algorithm::kFbscca;
  model.sample_rate = sample_rate;
  model.samples = samples;
  model.harmonics = harmonics;
  model.bank = DesignFilterBank(n_bands, sample_rate);
  model.weights = DefaultBandWeights(n_bands);
  model.classes = AllKeys();
  model.stimuli = StimuliFor(model.classes);
  ValidateModel(model);
  return model;
}

TrialTemplates BuildTemplates(const std::vector<LabeledTrial>& trials,
                              const std::vector<KeyId>& classes) {
  if (trials.empty()) throw Error(ErrorCode::kInsufficientTrainingData, "no trials");
  CheckTrialShapes(trials);
  const auto groups = GroupByClass(trials);
  TrialTemplates templates;
  for (KeyId k : classes) {
    auto it = groups.find(k);
    if (it == groups.end()) {
      throw Error(ErrorCode::kInsufficientTrainingData,
                  "no trial for class " + std::to_string(k.index()));
    }
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(it->second.front()->channels(),
                                                it->second.front()->samples());
    for (const EegTrial* t : it->second) sum += t->data;
    templates.means.push_back(sum / static_cast<double>(it->second.size()));
    templates.trial_counts.push_back(static_cast<int>(it->second.size()));
  }
  return templates;
}

DecoderModel MakeFbeccaModel(TrialTemplates templates, double sample_rate,
                             Eigen::Index samples, int n_bands, int harmonics) {
  DecoderModel model = MakeFbsccaModel(sample_rate, samples, n_bands, harmonics);
  model.algorithm = Algorithm::kFbecca;
  model.templates = std::move(templates);
  ValidateModel(model);
  return model;
}

DecoderModel FbdspTrain(const std::vector<LabeledTrial>& trials,
                        const std::vector<FilterSpec>& bank, int harmonics,
                        DspOptions options) {
  if (trials.empty()) throw Error(ErrorCode::kInsufficientTrainingData, "no trials");
  const auto groups = GroupByClass(trials);
  if (groups.size() < 2) {
    throw Error(ErrorCode::kInsufficientTrainingData, "need >= 2 classes");
  }
  for (const auto& [label, members] : groups) {
    if (members.size() < 2) {
      throw Error(ErrorCode::kInsufficientTrainingData,
                  "class " + std::to_string(label.index()) + " has < 2 trials");
    }
  }
  CheckTrialShapes(trials);
  const EegTrial& first = trials.front().trial;

  DecoderModel model;
  model.algorithm = Algorithm::kFbdsp;
  model.sample_rate = first.sample_rate;
  model.samples = first.samples();
  model.harmonics = harmonics;
  model.bank = bank;
  model.weights = DefaultBandWeights(static_cast<int>(bank.size()));
  for (const auto& entry : groups) model.classes.push_back(entry.first);
  model.stimuli = StimuliFor(model.classes);
  model.templates = BuildTemplates(trials, model.classes);

  const auto channels = first.channels();
  const auto components = std::min<Eigen::Index>(std::max(options.components, 1), channels);
  const auto filters = BankFilters(bank, model.sample_rate);
  for (const SosFilter& filter : filters) {
    std::vector<Eigen::MatrixXd> means;
    Eigen::MatrixXd within = Eigen::MatrixXd::Zero(channels, channels);
    for (const auto& [label, members] : groups) {
      std::vector<Eigen::MatrixXd> filtered;
      Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(channels, model.samples);
      for (const EegTrial* t : members) {
        filtered.push_back(CenterRows(FilterRows(filter, t->data, true)));
        mean += filtered.back();
      }
      mean /= static_cast<double>(members.size());
      for (const Eigen::MatrixXd& x : filtered) {
        const Eigen::MatrixXd d = x - mean;
        within += d * d.transpose();
      }
      means.push_back(std::move(mean));
    }
    Eigen::MatrixXd grand = Eigen::MatrixXd::Zero(channels, model.samples);
    for (const Eigen::MatrixXd& m : means) grand += m;
    grand /= static_cast<double>(means.size());
    Eigen::MatrixXd between = Eigen::MatrixXd::Zero(channels, channels);
    for (const Eigen::MatrixXd& m : means) {
      const Eigen::MatrixXd d = m - grand;
      between += d * d.transpose();
    }
    // Noise-free training data has no within-class scatter; borrow the
    // between-class scale for the ridge in that case.
    auto within_reg = Regularized(within, between.trace());
    if (!within_reg) throw Error(ErrorCode::kSingularScatter, "both scatters vanish");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(between, *within_reg);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::kSingularScatter, "generalized eigenproblem failed");
    }
    model.spatial_filters.push_back(solver.eigenvectors().rightCols(components).rowwise().reverse());
  }
  ValidateModel(model);
  return model;
}

DecoderModel FbtrcaTrain(const std::vector<LabeledTrial>& trials,
                         const std::vector<FilterSpec>& bank, TrcaOptions options) {
  if (trials.empty()) throw Error(ErrorCode::kInsufficientTrainingData, "no trials");
  const auto groups = GroupByClass(trials);
  for (const auto& [label, members] : groups) {
    if (members.size() < 2) {
      throw Error(ErrorCode::kInsufficientTrainingData,
                  "class " + std::to_string(label.index()) + " has < 2 trials");
    }
  }
  CheckTrialShapes(trials);
  const EegTrial& first = trials.front().trial;

  DecoderModel model;
  model.algorithm = Algorithm::kFbtrca;
  model.sample_rate = first.sample_rate;
  model.samples = first.samples();
  model.bank = bank;
  model.weights = DefaultBandWeights(static_cast<int>(bank.size()));
  model.trca_ensemble = options.ensemble;
  for (const auto& entry : groups) model.classes.push_back(entry.first);
  model.stimuli = StimuliFor(model.classes);
  model.templates = BuildTemplates(trials, model.classes);

  const auto channels = first.channels();
  const auto filters = BankFilters(bank, model.sample_rate);
  for (const SosFilter& filter : filters) {
    Eigen::MatrixXd w(channels, static_cast<Eigen::Index>(groups.size()));
    Eigen::Index col = 0;
    for (const auto& [label, members] : groups) {
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(channels, model.samples);
      Eigen::MatrixXd total = Eigen::MatrixXd::Zero(channels, channels);
      for (const EegTrial* t : members) {
        const Eigen::MatrixXd x = CenterRows(FilterRows(filter, t->data, true));
        sum += x;
        total += x * x.transpose();
      }
      const Eigen::MatrixXd cross = sum * sum.transpose() - total;
      auto total_reg = Regularized(total, 0.0);
      if (!total_reg) {
        throw Error(ErrorCode::kSingularCovariance,
                    "class " + std::to_string(label.index()) + " has zero covariance");
      }
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(cross, *total_reg);
      if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::kSingularCovariance, "generalized eigenproblem failed");
      }
      w.col(col++) = solver.eigenvectors().rightCols(1);
    }
    model.spatial_filters.push_back(std::move(w));
  }
  ValidateModel(model);
  return model;
}

Decoder::Decoder(DecoderModel model) : model_(std::move(model)) {
  ValidateModel(model_);
  filters_ = BankFilters(model_.bank, model_.sample_rate);
  const std::size_t n_classes = model_.classes.size();

  if (model_.algorithm == Algorithm::kFbscca || model_.algorithm == Algorithm::kFbecca) {
    for (const StimulusSpec& stim : model_.stimuli) {
      references_.emplace_back(
          ReferenceSignals(stim, model_.harmonics, model_.samples, model_.sample_rate));
    }
  }
  if (model_.algorithm == Algorithm::kFbscca) return;

  for (std::size_t m = 0; m < filters_.size(); ++m) {
    std::vector<Eigen::MatrixXd> filtered;
    for (std::size_t k = 0; k < n_classes; ++k) {
      filtered.push_back(FilterRows(filters_[m], model_.templates->means[k], true));
    }
    if (model_.algorithm == Algorithm::kFbecca) {
      std::vector<CcaSubspace> subspaces;
      for (const Eigen::MatrixXd& t : filtered) subspaces.emplace_back(t);
      template_subspaces_.push_back(std::move(subspaces));
    } else {
      std::vector<Eigen::MatrixXd> projected;
      const Eigen::MatrixXd& w = model_.spatial_filters[m];
      for (std::size_t k = 0; k < n_classes; ++k) {
        if (model_.algorithm == Algorithm::kFbtrca && !model_.trca_ensemble) {
          projected.push_back(w.col(static_cast<Eigen::Index>(k)).transpose() * filtered[k]);
        } else {
          projected.push_back(w.transpose() * filtered[k]);
        }
      }
      projected_templates_.push_back(std::move(projected));
    }
    filtered_templates_.push_back(std::move(filtered));
  }
}

std::vector<double> Decoder::ScoresFbscca(const std::vector<Eigen::MatrixXd>& bands) const {
  std::vector<double> scores(model_.classes.size(), 0.0);
  for (std::size_t m = 0; m < bands.size(); ++m) {
    const CcaSubspace x(bands[m]);
    for (std::size_t k = 0; k < scores.size(); ++k) {
      const double rho = Cca(x, references_[k]).rho;
      scores[k] += model_.weights[m] * rho * rho;
    }
  }
  return scores;
}

std::vector<double> Decoder::ScoresFbecca(const std::vector<Eigen::MatrixXd>& bands) const {
  std::vector<double> scores(model_.classes.size(), 0.0);
  for (std::size_t m = 0; m < bands.size(); ++m) {
    const Eigen::MatrixXd& x = bands[m];
    const CcaSubspace sx(x);
    for (std::size_t k = 0; k < scores.size(); ++k) {
      const Eigen::MatrixXd& tmpl = filtered_templates_[m][k];
      const CcaSubspace& st = template_subspaces_[m][k];
      const CcaResult with_ref = Cca(sx, references_[k]);
      const CcaResult with_tmpl = Cca(sx, st);
      const CcaResult tmpl_ref = Cca(st, references_[k]);
      auto projected_corr = [&](const Eigen::VectorXd& w) {
        return Pearson(w.transpose() * x, w.transpose() * tmpl);
      };
      const double features[] = {
          with_ref.rho,
          projected_corr(with_tmpl.x_weights),
          projected_corr(with_ref.x_weights),
          projected_corr(tmpl_ref.x_weights),
      };
      double combined = 0.0;
      for (double r : features) combined += SignedSquare(r);
      scores[k] += model_.weights[m] * combined;
    }
  }
  return scores;
}

std::vector<double> Decoder::ScoresProjected(const std::vector<Eigen::MatrixXd>& bands) const {
  std::vector<double> scores(model_.classes.size(), 0.0);
  const bool per_class = model_.algorithm == Algorithm::kFbtrca && !model_.trca_ensemble;
  for (std::size_t m = 0; m < bands.size(); ++m) {
    const Eigen::MatrixXd& w = model_.spatial_filters[m];
    const Eigen::MatrixXd shared = per_class ? Eigen::MatrixXd() : w.transpose() * bands[m];
    for (std::size_t k = 0; k < scores.size(); ++k) {
      double r = 0.0;
      if (per_class) {
        const Eigen::RowVectorXd y = w.col(static_cast<Eigen::Index>(k)).transpose() * bands[m];
        r = Pearson(y, projected_templates_[m][k]);
      } else {
        r = PearsonFlat(shared, projected_templates_[m][k]);
      }
      scores[k] += model_.weights[m] * SignedSquare(r);
    }
  }
  return scores;
}

DecodeResult Decoder::Classify(const EegTrial& trial) const {
  if (trial.samples() != model_.samples || trial.sample_rate != model_.sample_rate) {
    throw Error(ErrorCode::kModelMismatch, "trial length or rate differs from model");
  }
  if (!filtered_templates_.empty() &&
      trial.channels() != filtered_templates_.front().front().rows()) {
    throw Error(ErrorCode::kModelMismatch, "trial channel count differs from templates");
  }
  if (trial.data.isZero(0.0)) throw Error(ErrorCode::kDegenerateInput, "all-zero trial");

  std::vector<Eigen::MatrixXd> bands;
  bands.reserve(filters_.size());
  for (const SosFilter& f : filters_) bands.push_back(FilterRows(f, trial.data, true));

  DecodeResult result;
  switch (model_.algorithm) {
    case Algorithm::kFbscca: result.scores = ScoresFbscca(bands); break;
    case Algorithm::kFbecca: result.scores = ScoresFbecca(bands); break;
    case Algorithm::kFbdsp:
    case Algorithm::kFbtrca: result.scores = ScoresProjected(bands); break;
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < result.scores.size(); ++k) {
    if (result.scores[k] > result.scores[best]) best = k;
  }
  result.predicted = model_.classes[best];
  return result;
}

namespace {

DecodeResult ClassifyAs(Algorithm expected, const EegTrial& trial, const DecoderModel& model) {
  if (model.algorithm != expected) {
    throw Error(ErrorCode::kModelMismatch, std::string("model is ") +
                                               std::string(AlgorithmName(model.algorithm)));
  }
  return Decoder(model).Classify(trial);
}

}  // namespace

DecodeResult FbsccaClassify(const EegTrial& trial, const DecoderModel& model) {
  return ClassifyAs(Algorithm::kFbscca, trial, model);
}
DecodeResult FbeccaClassify(const EegTrial& trial, const DecoderModel& model) {
  if (model.algorithm == Algorithm::kFbecca && !model.templates) {
    throw Error(ErrorCode::kMissingTemplates, "FBECCA model has no templates");
  }
  return ClassifyAs(Algorithm::kFbecca, trial, model);
}
DecodeResult FbdspClassify(const EegTrial& trial, const DecoderModel& model) {
  return ClassifyAs(Algorithm::kFbdsp, trial, model);
}
DecodeResult FbtrcaClassify(const EegTrial& trial, const DecoderModel& model) {
  return ClassifyAs(Algorithm::kFbtrca, trial, model);
}

double EvaluateAccuracy(const Decoder& decoder, const std::vector<LabeledTrial>& trials) {
  if (trials.empty()) throw Error(ErrorCode::kEmptySet, "no trials to evaluate");
  std::size_t hits = 0;
  for (const LabeledTrial& t : trials) {
    if (decoder.Classify(t.trial).predicted == t.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials.size());
}

nlohmann::json ModelToJson(const DecoderModel& model) {
  nlohmann::json doc = {
      {"format", "mindchat-decoder"},
      {"version", 1},
      {"algorithm", AlgorithmName(model.algorithm)},
      {"sample_rate", model.sample_rate},
      {"samples", model.samples},
      {"harmonics", model.harmonics},
      {"weights", model.weights},
      {"trca_ensemble", model.trca_ensemble},
  };
  auto bank = nlohmann::json::array();
  for (const FilterSpec& f : model.bank) {
    bank.push_back({{"low_hz", f.low_hz}, {"high_hz", f.high_hz}, {"order", f.order},
                    {"zero_phase", f.zero_phase}});
  }
  doc["bank"] = bank;
  auto classes = nlohmann::json::array();
  for (std::size_t k = 0; k < model.classes.size(); ++k) {
    classes.push_back({{"key", model.classes[k].index()},
                       {"frequency_hz", model.stimuli[k].frequency_hz},
                       {"phase_rad", model.stimuli[k].phase_rad}});
  }
  doc["classes"] = classes;
  if (model.templates) {
    auto templates = nlohmann::json::array();
    for (std::size_t k = 0; k < model.templates->means.size(); ++k) {
      templates.push_back({{"trial_count", model.templates->trial_counts[k]},
                           {"mean", MatrixToJson(model.templates->means[k])}});
    }
    doc["templates"] = templates;
  }
  auto filters = nlohmann::json::array();
  for (const Eigen::MatrixXd& w : model.spatial_filters) filters.push_back(MatrixToJson(w));
  doc["spatial_filters"] = filters;
  return doc;
}

DecoderModel ModelFromJson(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "mindchat-decoder" || doc.at("version") != 1) {
      throw Error(ErrorCode::kSchemaError, "unsupported decoder container");
    }
    DecoderModel model;
    model.algorithm = ParseAlgorithm(doc.at("algorithm").get<std::string>());
    model.sample_rate = doc.at("sample_rate").get<double>();
    model.samples = doc.at("samples").get<Eigen::Index>();
    model.harmonics = doc.at("harmonics").get<int>();
    model.weights = doc.at("weights").get<std::vector<double>>();
    model.trca_ensemble = doc.value("trca_ensemble", false);
    for (const auto& f : doc.at("bank")) {
      model.bank.push_back(FilterSpec{f.at("low_hz").get<double>(), f.at("high_hz").get<double>(),
                                      f.at("order").get<int>(), f.at("zero_phase").get<bool>()});
    }
    for (const auto& c : doc.at("classes")) {
      model.classes.emplace_back(c.at("key").get<int>());
      model.stimuli.push_back(
          StimulusSpec{c.at("frequency_hz").get<double>(), c.at("phase_rad").get<double>()});
    }
    if (doc.contains("templates")) {
      TrialTemplates t;
      for (const auto& entry : doc.at("templates")) {
        t.trial_counts.push_back(entry.at("trial_count").get<int>());
        t.means.push_back(MatrixFromJson(entry.at("mean")));
      }
      model.templates = std::move(t);
    }
    for (const auto& w : doc.at("spatial_filters")) {
      model.spatial_filters.push_back(MatrixFromJson(w));
    }
    ValidateModel(model);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("decoder container: ") + e.what());
  }
}

void SaveModel(const std::filesystem::path& path, const DecoderModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << ModelToJson(model).dump() << '\n';
}

DecoderModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, e.what());
  }
  return ModelFromJson(doc);
}

}  // namespace mindchat
