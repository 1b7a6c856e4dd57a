#include "mindchat/signal.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mindchat/error.hpp"

namespace mindchat {
namespace {

constexpr double kPi = std::numbers::pi;

// Paul Kellet's refined pink-noise filter, run past a burn-in so the
// low-frequency poles are settled before the first kept sample.
Eigen::VectorXd PinkNoise(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr int kBurnIn = 2000;
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = -kBurnIn; i < n; ++i) {
    const double white = gauss(rng);
    b0 = 0.99886 * b0 + white * 0.0555179;
    b1 = 0.99332 * b1 + white * 0.0750759;
    b2 = 0.96900 * b2 + white * 0.1538520;
    b3 = 0.86650 * b3 + white * 0.3104856;
    b4 = 0.55000 * b4 + white * 0.5329522;
    b5 = -0.7616 * b5 - white * 0.0168980;
    const double pink = b0 + b1 + b2 + b3 + b4 + b5 + b6 + white * 0.5362;
    b6 = white * 0.115926;
    if (i >= 0) out[i] = pink;
  }
  return out;
}

Biquad NormalizedBiquad(double b0, double b1, double b2, double a0, double a1,
                        double a2) {
  return Biquad{b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0};
}

std::vector<Biquad> ButterworthSections(int order, double cutoff_hz,
                                        double sample_rate, bool highpass) {
  if (order <= 0 || order % 2 != 0) {
    throw Error(ErrorCode::kInvalidConfig, "Butterworth order must be positive and even");
  }
  if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0)) {
    throw Error(ErrorCode::kInvalidConfig, "cutoff must lie in (0, fs/2)");
  }
  const double w0 = 2.0 * kPi * cutoff_hz / sample_rate;
  const double cosw = std::cos(w0);
  const double sinw = std::sin(w0);
  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = kPi * (2.0 * k + 1.0) / (2.0 * order);
    const double q = 1.0 / (2.0 * std::cos(theta));
    const double alpha = sinw / (2.0 * q);
    if (highpass) {
      sections.push_back(NormalizedBiquad((1 + cosw) / 2, -(1 + cosw), (1 + cosw) / 2,
                                          1 + alpha, -2 * cosw, 1 - alpha));
    } else {
      sections.push_back(NormalizedBiquad((1 - cosw) / 2, 1 - cosw, (1 - cosw) / 2,
                                          1 + alpha, -2 * cosw, 1 - alpha));
    }
  }
  return sections;
}

Eigen::VectorXd LinearResample(const Eigen::VectorXd& x, double from_rate,
                               double to_rate, Eigen::Index out_len) {
  Eigen::VectorXd y(out_len);
  const double step = from_rate / to_rate;
  for (Eigen::Index i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto lo = static_cast<Eigen::Index>(std::floor(pos));
    if (lo + 1 >= x.size()) {
      y[i] = x[x.size() - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(lo);
    y[i] = (1.0 - frac) * x[lo] + frac * x[lo + 1];
  }
  return y;
}

}  // namespace

Eigen::MatrixXd RandomMixing(int channels, int sources, std::uint64_t seed) {
  if (channels < 1 || sources < 1 || sources > channels) {
    throw Error(ErrorCode::kInvalidConfig, "mixing needs 1 <= sources <= channels");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 16; ++attempt) {
    Eigen::MatrixXd m(channels, sources);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = gauss(rng);
    }
    if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(m).rank() == sources) return m;
  }
  throw Error(ErrorCode::kInvalidConfig, "could not draw a full-rank mixing matrix");
}

SynthConfig DefaultSynthConfig(std::uint64_t subject_seed) {
  SynthConfig cfg;
  cfg.mixing = RandomMixing(static_cast<int>(kDefaultChannels.size()), cfg.harmonics,
                            subject_seed);
  return cfg;
}

void ValidateSynthConfig(const SynthConfig& cfg) {
  if (cfg.harmonics < 1) throw Error(ErrorCode::kInvalidConfig, "harmonics must be >= 1");
  if (!(cfg.duration_s > 0.0)) throw Error(ErrorCode::kInvalidConfig, "duration must be > 0");
  if (!(cfg.sample_rate > 0.0)) throw Error(ErrorCode::kInvalidConfig, "sample rate must be > 0");
  if (std::isnan(cfg.snr_db) || cfg.snr_db == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kInvalidConfig, "snr_db must be finite or +inf");
  }
  if (cfg.mixing.cols() != cfg.harmonics) {
    throw Error(ErrorCode::kInvalidConfig, "mixing must have one column per harmonic");
  }
  if (cfg.mixing.rows() < cfg.harmonics ||
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(cfg.mixing).rank() != cfg.harmonics) {
    throw Error(ErrorCode::kInvalidConfig, "mixing matrix is not full rank");
  }
  if (!cfg.mixing.allFinite()) throw Error(ErrorCode::kInvalidConfig, "mixing not finite");
}

EegTrial SynthTrial(const StimulusSpec& stim, const SynthConfig& cfg, std::uint64_t seed) {
  ValidateSynthConfig(cfg);
  const auto samples = static_cast<Eigen::Index>(std::lround(cfg.duration_s * cfg.sample_rate));
  if (samples < 1) throw Error(ErrorCode::kInvalidConfig, "trial has no samples");

  Eigen::MatrixXd sources(cfg.harmonics, samples);
  for (int h = 1; h <= cfg.harmonics; ++h) {
    const double amp = 1.0 / h;
    for (Eigen::Index n = 0; n < samples; ++n) {
      const double t = static_cast<double>(n) / cfg.sample_rate;
      sources(h - 1, n) =
          amp * std::sin(2.0 * kPi * h * stim.frequency_hz * t + h * stim.phase_rad);
    }
  }

  EegTrial trial;
  trial.sample_rate = cfg.sample_rate;
  trial.data = cfg.mixing * sources;
  if (std::isinf(cfg.snr_db)) return trial;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd noise(trial.channels(), samples);
  for (Eigen::Index c = 0; c < noise.rows(); ++c) {
    if (cfg.noise_kind == NoiseKind::kPink) {
      noise.row(c) = PinkNoise(samples, rng).transpose();
    } else {
      for (Eigen::Index n = 0; n < samples; ++n) noise(c, n) = gauss(rng);
    }
  }
  const double signal_energy = trial.data.squaredNorm();
  const double noise_energy = noise.squaredNorm();
  const double scale =
      std::sqrt(signal_energy / (noise_energy * std::pow(10.0, cfg.snr_db / 10.0)));
  trial.data += scale * noise;
  return trial;
}

void ValidateFilterSpec(const FilterSpec& spec, double sample_rate) {
  if (!(spec.low_hz > 0.0 && spec.low_hz < spec.high_hz &&
        spec.high_hz < sample_rate / 2.0)) {
    throw Error(ErrorCode::kInvalidConfig, "filter needs 0 < low < high < fs/2");
  }
  if (spec.order <= 0 || spec.order % 2 != 0) {
    throw Error(ErrorCode::kInvalidConfig, "filter order must be positive and even");
  }
}

Eigen::VectorXd SosFilter::Run(const Eigen::VectorXd& x, double x0) const {
  Eigen::VectorXd y = x;
  double level = x0;  // steady-state input level seen by the current section
  for (const Biquad& s : sections_) {
    const double dc_gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double out_level = dc_gain * level;
    double z2 = s.b2 * level - s.a2 * out_level;
    double z1 = out_level - s.b0 * level;
    for (Eigen::Index n = 0; n < y.size(); ++n) {
      const double in = y[n];
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      y[n] = out;
    }
    level = out_level;
  }
  return y;
}

Eigen::VectorXd SosFilter::Filter(const Eigen::VectorXd& x) const { return Run(x, 0.0); }

Eigen::VectorXd SosFilter::FilterZeroPhase(const Eigen::VectorXd& x) const {
  const Eigen::Index len = x.size();
  if (len < 2) return x;
  const Eigen::Index pad = std::min<Eigen::Index>(
      len - 1, 3 * (2 * static_cast<Eigen::Index>(sections_.size()) + 1));

  Eigen::VectorXd ext(len + 2 * pad);
  for (Eigen::Index i = 0; i < pad; ++i) {
    ext[i] = 2.0 * x[0] - x[pad - i];
    ext[pad + len + i] = 2.0 * x[len - 1] - x[len - 2 - i];
  }
  ext.segment(pad, len) = x;

  Eigen::VectorXd fwd = Run(ext, ext[0]);
  Eigen::VectorXd rev = fwd.reverse();
  Eigen::VectorXd back = Run(rev, rev[0]).reverse();
  return back.segment(pad, len);
}

double SosFilter::MagnitudeAt(double freq_hz, double sample_rate) const {
  const std::complex<double> z = std::polar(1.0, 2.0 * kPi * freq_hz / sample_rate);
  const std::complex<double> zi = 1.0 / z;
  std::complex<double> h(1.0, 0.0);
  for (const Biquad& s : sections_) {
    h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
  }
  return std::abs(h);
}

SosFilter DesignButterworthLowpass(int order, double cutoff_hz, double sample_rate) {
  return SosFilter(ButterworthSections(order, cutoff_hz, sample_rate, false));
}

SosFilter DesignButterworthHighpass(int order, double cutoff_hz, double sample_rate) {
  return SosFilter(ButterworthSections(order, cutoff_hz, sample_rate, true));
}

SosFilter DesignBandpass(const FilterSpec& spec, double sample_rate) {
  ValidateFilterSpec(spec, sample_rate);
  auto sections = ButterworthSections(spec.order, spec.low_hz, sample_rate, true);
  auto low = ButterworthSections(spec.order, spec.high_hz, sample_rate, false);
  sections.insert(sections.end(), low.begin(), low.end());
  return SosFilter(std::move(sections));
}

EegTrial ApplyFilter(const EegTrial& trial, const SosFilter& filter, bool zero_phase) {
  EegTrial out;
  out.sample_rate = trial.sample_rate;
  out.data.resize(trial.channels(), trial.samples());
  for (Eigen::Index c = 0; c < trial.channels(); ++c) {
    Eigen::VectorXd row = trial.data.row(c).transpose();
    out.data.row(c) =
        (zero_phase ? filter.FilterZeroPhase(row) : filter.Filter(row)).transpose();
  }
  return out;
}

EegTrial ApplyFilter(const EegTrial& trial, const FilterSpec& spec) {
  return ApplyFilter(trial, DesignBandpass(spec, trial.sample_rate), spec.zero_phase);
}

FilterSpec PreprocessBand() { return FilterSpec{7.0, 70.0, 4, true}; }

EegTrial Preprocess(const EegTrial& trial) {
  if (trial.sample_rate < 2.0 * kDecodeSampleRate) {
    throw Error(ErrorCode::kSampleRateTooLow,
                "need >= 480 Hz, got " + std::to_string(trial.sample_rate));
  }
  if (!trial.data.allFinite()) throw Error(ErrorCode::kDegenerateInput, "non-finite samples");

  // Anti-alias below the 120 Hz Nyquist of the decoding rate.
  const SosFilter anti_alias = DesignButterworthLowpass(8, 96.0, trial.sample_rate);
  const EegTrial smoothed = ApplyFilter(trial, anti_alias, true);

  const double ratio = trial.sample_rate / kDecodeSampleRate;
  const auto out_len = static_cast<Eigen::Index>(
      std::lround(static_cast<double>(trial.samples()) / ratio));
  EegTrial down;
  down.sample_rate = kDecodeSampleRate;
  down.data.resize(trial.channels(), out_len);
  const long factor = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(factor)) < 1e-9) {
    for (Eigen::Index n = 0; n < out_len; ++n) {
      const Eigen::Index src = std::min<Eigen::Index>(n * factor, trial.samples() - 1);
      down.data.col(n) = smoothed.data.col(src);
    }
  } else {
    for (Eigen::Index c = 0; c < trial.channels(); ++c) {
      down.data.row(c) = LinearResample(smoothed.data.row(c).transpose(), trial.sample_rate,
                                        kDecodeSampleRate, out_len)
                             .transpose();
    }
  }
  return ApplyFilter(down, PreprocessBand());
}

std::vector<FilterSpec> DesignFilterBank(int n_bands, double sample_rate) {
  if (n_bands < 1 || 8 * n_bands >= 70) {
    throw Error(ErrorCode::kInvalidBandCount,
                "need 1 <= n_bands and 8*n_bands < 70, got " + std::to_string(n_bands));
  }
  std::vector<FilterSpec> bank;
  for (int m = 1; m <= n_bands; ++m) {
    FilterSpec spec{8.0 * m, 70.0, 4, true};
    ValidateFilterSpec(spec, sample_rate);
    bank.push_back(spec);
  }
  return bank;
}

void WriteTrial(const std::filesystem::path& path, const EegTrial& trial) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  const nlohmann::json header = {{"channels", trial.channels()},
                                 {"samples", trial.samples()},
                                 {"sample_rate", trial.sample_rate}};
  out << header.dump() << '\n' << std::setprecision(17);
  for (Eigen::Index c = 0; c < trial.channels(); ++c) {
    for (Eigen::Index n = 0; n < trial.samples(); ++n) {
      if (n) out << ',';
      out << trial.data(c, n);
    }
    out << '\n';
  }
}

EegTrial ReadTrial(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("bad trial header: ") + e.what());
  }
  EegTrial trial;
  const auto channels = header.at("channels").get<Eigen::Index>();
  const auto samples = header.at("samples").get<Eigen::Index>();
  trial.sample_rate = header.at("sample_rate").get<double>();
  trial.data.resize(channels, samples);
  for (Eigen::Index c = 0; c < channels; ++c) {
    if (!std::getline(in, line)) throw Error(ErrorCode::kSchemaError, "missing channel row");
    std::stringstream row(line);
    std::string cell;
    Eigen::Index n = 0;
    while (std::getline(row, cell, ',')) {
      if (n >= samples) throw Error(ErrorCode::kSchemaError, "row longer than header");
      trial.data(c, n++) = std::stod(cell);
    }
    if (n != samples) throw Error(ErrorCode::kSchemaError, "row shorter than header");
  }
  return trial;
}

}  // namespace mindchat
