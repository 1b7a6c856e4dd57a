#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mindchat/keyboard.hpp"

namespace mindchat {

// Parietal-occipital montage used for SSVEP recording.
inline constexpr std::array<std::string_view, 9> kDefaultChannels = {
    "Pz", "PO1", "PO2", "POz", "PO4", "PO6", "Oz", "O1", "O2"};

inline constexpr double kRawSampleRate = 1200.0;
inline constexpr double kDecodeSampleRate = 240.0;
inline constexpr double kTrialSeconds = 1.5;

// Channels x samples.
struct EegTrial {
  Eigen::MatrixXd data;
  double sample_rate = kDecodeSampleRate;

  Eigen::Index channels() const { return data.rows(); }
  Eigen::Index samples() const { return data.cols(); }
};

enum class NoiseKind { kWhite, kPink };

struct SynthConfig {
  int harmonics = 5;
  // +infinity produces a noiseless trial.
  double snr_db = 10.0;
  // channels x harmonics, one spatial pattern per harmonic source.
  Eigen::MatrixXd mixing;
  NoiseKind noise_kind = NoiseKind::kPink;
  double duration_s = kTrialSeconds;
  double sample_rate = kRawSampleRate;

  static constexpr double kNoiseless = std::numeric_limits<double>::infinity();
};

// Seeded Gaussian mixing matrix; full column rank is checked.
Eigen::MatrixXd RandomMixing(int channels, int sources, std::uint64_t seed);

// Default configuration with a 9-channel random mixing drawn from `subject_seed`.
SynthConfig DefaultSynthConfig(std::uint64_t subject_seed = 1);

// Throws Error(kInvalidConfig).
void ValidateSynthConfig(const SynthConfig& cfg);

// data = mixing * S + N where S holds (1/h) sin(2 pi h f t + h phi) for
// h = 1..harmonics and N is scaled to the requested channel-average SNR.
// Pure in (stim, cfg, seed).
EegTrial SynthTrial(const StimulusSpec& stim, const SynthConfig& cfg,
                    std::uint64_t seed);

struct FilterSpec {
  double low_hz = 7.0;
  double high_hz = 70.0;
  int order = 4;  // Butterworth order of each of the high- and low-pass halves
  bool zero_phase = true;

  bool operator==(const FilterSpec&) const = default;
};

// Throws Error(kInvalidConfig) unless 0 < low < high < fs/2 and order is a
// positive even number.
void ValidateFilterSpec(const FilterSpec& spec, double sample_rate);

struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0, a1 = 0.0, a2 = 0.0;
};

// Cascade of second-order sections.
class SosFilter {
 public:
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const { return sections_; }

  // Single causal pass.
  Eigen::VectorXd Filter(const Eigen::VectorXd& x) const;
  // Forward-backward pass with odd-extension padding and steady-state
  // initial conditions; zero phase, squared magnitude response.
  Eigen::VectorXd FilterZeroPhase(const Eigen::VectorXd& x) const;

  double MagnitudeAt(double freq_hz, double sample_rate) const;

 private:
  Eigen::VectorXd Run(const Eigen::VectorXd& x, double x0) const;
  std::vector<Biquad> sections_;
};

SosFilter DesignButterworthLowpass(int order, double cutoff_hz, double sample_rate);
SosFilter DesignButterworthHighpass(int order, double cutoff_hz, double sample_rate);
// High-pass at spec.low_hz cascaded with low-pass at spec.high_hz.
SosFilter DesignBandpass(const FilterSpec& spec, double sample_rate);

EegTrial ApplyFilter(const EegTrial& trial, const FilterSpec& spec);
EegTrial ApplyFilter(const EegTrial& trial, const SosFilter& filter, bool zero_phase);

// Resample to 240 Hz (anti-aliased, integer decimation when the ratio is
// whole) then band-pass 7-70 Hz zero-phase.
// Throws Error(kSampleRateTooLow) below 480 Hz.
EegTrial Preprocess(const EegTrial& trial);

FilterSpec PreprocessBand();

// Sub-band m (1-based) passes [8m, 70] Hz.
// Throws Error(kInvalidBandCount) unless 1 <= n_bands and 8*n_bands < 70.
std::vector<FilterSpec> DesignFilterBank(int n_bands, double sample_rate);

// One JSON header line ({"channels", "samples", "sample_rate"}) followed by
// one CSV row per channel.
void WriteTrial(const std::filesystem::path& path, const EegTrial& trial);
EegTrial ReadTrial(const std::filesystem::path& path);

}  // namespace mindchat
