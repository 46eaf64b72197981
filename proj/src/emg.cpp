#include "drumsim/emg.hpp"

#include "drumsim/csv.hpp"
#include "drumsim/kernels.hpp"
#include "drumsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace drumsim::emg {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
} // namespace

void EmgRecording::validate() const {
  require(sample_rate >= 2000, "EmgRecording.sample_rate must be >= 2000 Hz");
  require(!channels.empty(), "EmgRecording.channels must be non-empty");
  const std::size_t len = channels.front().size();
  for (const auto& ch : channels) {
    require(ch.size() == len, "EmgRecording channels must have equal length");
  }
  const double dur = duration();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0.0 && labels[i] <= dur, "EmgRecording label outside recording");
    if (i > 0) require(labels[i] > labels[i - 1], "EmgRecording labels must be strictly increasing");
  }
}

void FilterChainConfig::validate(int sample_rate) const {
  require(diff_gain > 0.0, "FilterChainConfig.diff_gain must be > 0");
  require(maf_window > 0.0, "FilterChainConfig.maf_window must be > 0");
  require(hpf_cutoff > 0.0, "FilterChainConfig.hpf_cutoff must be > 0");
  require(hpf_cutoff < notch_center, "FilterChainConfig requires hpf_cutoff < notch_center");
  require(notch_center < lpf_cutoff, "FilterChainConfig requires notch_center < lpf_cutoff");
  require(lpf_cutoff < sample_rate / 2.0, "FilterChainConfig requires lpf_cutoff < Nyquist");
  require(notch_q > 0.0, "FilterChainConfig.notch_q must be > 0");
  require(gate_threshold >= 0.0, "FilterChainConfig.gate_threshold must be >= 0");
  require(gate_release >= 0.0, "FilterChainConfig.gate_release must be >= 0");
}

bool BiquadCoefficients::stable() const {
  // Jury criterion for z^2 + a1 z + a2.
  return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

std::vector<double> differential_rectify(const std::vector<double>& chan_a,
                                         const std::vector<double>& chan_b, double gain) {
  require(chan_a.size() == chan_b.size(), "differential_rectify: channel length mismatch");
  require(gain > 0.0, "differential_rectify: gain must be > 0");
  std::vector<double> out(chan_a.size());
  kernels::diff_rectify(chan_a.data(), chan_b.data(), gain, out.data(), out.size());
  return out;
}

std::vector<double> rms_moving_average(const std::vector<double>& signal, double window_seconds,
                                       int sample_rate) {
  require(window_seconds > 0.0, "rms_moving_average: window must be > 0");
  require(window_seconds * sample_rate >= 1.0, "rms_moving_average: window shorter than one sample");
  const std::size_t win =
      static_cast<std::size_t>(std::llround(window_seconds * sample_rate));
  const std::size_t n = signal.size();

  std::vector<double> squares(n);
  kernels::square(signal.data(), squares.data(), n);

  std::vector<double> out(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += squares[i];
    if (i >= win) acc -= squares[i - win];
    const std::size_t count = std::min(i + 1, win);
    // acc can go epsilon-negative after many add/subtract cycles.
    out[i] = std::sqrt(std::max(acc, 0.0) / static_cast<double>(count));
  }
  return out;
}

BiquadCoefficients design_biquad(BiquadKind kind, double center_or_cutoff_hz, double q,
                                 int sample_rate) {
  require(center_or_cutoff_hz > 0.0 && center_or_cutoff_hz < sample_rate / 2.0,
          "design_biquad: frequency must be in (0, Nyquist)");
  require(q > 0.0, "design_biquad: q must be > 0");

  const double w0 = kTwoPi * center_or_cutoff_hz / sample_rate;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  const double alpha = sw / (2.0 * q);

  double b0, b1, b2, a0, a1, a2;
  switch (kind) {
    case BiquadKind::lowpass:
      b0 = (1.0 - cw) / 2.0;
      b1 = 1.0 - cw;
      b2 = (1.0 - cw) / 2.0;
      break;
    case BiquadKind::highpass:
      b0 = (1.0 + cw) / 2.0;
      b1 = -(1.0 + cw);
      b2 = (1.0 + cw) / 2.0;
      break;
    case BiquadKind::notch:
      b0 = 1.0;
      b1 = -2.0 * cw;
      b2 = 1.0;
      break;
    default:
      throw std::invalid_argument("design_biquad: unknown kind");
  }
  a0 = 1.0 + alpha;
  a1 = -2.0 * cw;
  a2 = 1.0 - alpha;

  BiquadCoefficients c;
  c.b0 = b0 / a0;
  c.b1 = b1 / a0;
  c.b2 = b2 / a0;
  c.a1 = a1 / a0;
  c.a2 = a2 / a0;
  return c;
}

double magnitude_response(const BiquadCoefficients& c, double freq_hz, int sample_rate) {
  const std::complex<double> z = std::polar(1.0, -kTwoPi * freq_hz / sample_rate);
  const std::complex<double> num = c.b0 + (c.b1 + c.b2 * z) * z;
  const std::complex<double> den = 1.0 + (c.a1 + c.a2 * z) * z;
  return std::abs(num / den);
}

std::vector<double> biquad_filter(const std::vector<double>& signal,
                                  const BiquadCoefficients& c) {
  std::vector<double> out(signal.size());
  double z1 = 0.0, z2 = 0.0;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double x = signal[i];
    const double y = c.b0 * x + z1;
    z1 = c.b1 * x - c.a1 * y + z2;
    z2 = c.b2 * x - c.a2 * y;
    out[i] = y;
  }
  return out;
}

std::vector<double> noise_gate(const std::vector<double>& signal, double threshold,
                               double release_seconds, int sample_rate) {
  require(threshold >= 0.0, "noise_gate: threshold must be >= 0");
  const long release = std::llround(release_seconds * sample_rate);
  std::vector<double> out(signal.size());
  long last_open = -release - 1;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    if (signal[i] >= threshold) last_open = static_cast<long>(i);
    const bool open = static_cast<long>(i) - last_open <= release;
    out[i] = open ? signal[i] : 0.0;
  }
  return out;
}

std::vector<double> clamp_nonnegative(std::vector<double> signal) {
  for (double& v : signal) v = std::max(v, 0.0);
  return signal;
}

ActivationSignal apply_chain(const EmgRecording& recording, int chan_a, int chan_b,
                             const FilterChainConfig& config) {
  recording.validate();
  config.validate(recording.sample_rate);
  require(chan_a >= 0 && chan_b >= 0 &&
              chan_a < static_cast<int>(recording.channels.size()) &&
              chan_b < static_cast<int>(recording.channels.size()),
          "apply_chain: channel index out of range");

  const int fs = recording.sample_rate;
  const double butterworth_q = 0.7071067811865476;

  auto x = differential_rectify(recording.channels[chan_a], recording.channels[chan_b],
                                config.diff_gain);
  x = rms_moving_average(x, config.maf_window, fs);
  x = biquad_filter(x, design_biquad(BiquadKind::lowpass, config.lpf_cutoff, butterworth_q, fs));
  x = biquad_filter(x, design_biquad(BiquadKind::notch, config.notch_center, config.notch_q, fs));
  x = biquad_filter(x, design_biquad(BiquadKind::highpass, config.hpf_cutoff, butterworth_q, fs));
  x = clamp_nonnegative(std::move(x));
  x = noise_gate(x, config.gate_threshold, config.gate_release, fs);

  ActivationSignal out;
  out.sample_rate = fs;
  out.samples = std::move(x);
  return out;
}

EmgRecording synth_emg(const std::vector<double>& burst_times, const BurstParams& burst,
                       const Interference& interference, double noise_floor,
                       std::uint64_t seed, int sample_rate, double tail_seconds) {
  require(burst.duration > 0.0, "synth_emg: burst duration must be > 0");
  for (std::size_t i = 0; i < burst_times.size(); ++i) {
    require(burst_times[i] >= 0.0, "synth_emg: burst times must be >= 0");
    if (i > 0) {
      require(burst_times[i] >= burst_times[i - 1] + burst.duration,
              "synth_emg: bursts overlap");
    }
  }

  const double total = (burst_times.empty() ? 0.0 : burst_times.back() + burst.duration) +
                       tail_seconds;
  const std::size_t n = static_cast<std::size_t>(std::llround(total * sample_rate));
  EmgRecording rec;
  rec.sample_rate = sample_rate;
  rec.channels.assign(2, std::vector<double>(n, 0.0));
  rec.labels = burst_times;

  Rng rng(derive_seed(seed, 0xe3c5u));
  auto& ch0 = rec.channels[0];
  auto& ch1 = rec.channels[1];

  // Common-mode line interference; `imbalance` of it survives the
  // differential stage.
  for (std::size_t h = 0; h < interference.harmonic_amps.size(); ++h) {
    const double amp = interference.harmonic_amps[h];
    if (amp == 0.0) continue;
    const double f = interference.line_hz * static_cast<double>(h + 1);
    const double phase = rng.uniform(0.0, kTwoPi);
    const double ch1_scale = 1.0 - interference.imbalance;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      const double v = amp * std::sin(kTwoPi * f * t + phase);
      ch0[i] += v;
      ch1[i] += v * ch1_scale;
    }
  }

  // Differential bursts: band-limited random-phase carrier under a
  // fast-attack envelope, split +/- across the pair.
  constexpr int kCarriers = 24;
  constexpr double kAttack = 0.012;  // seconds
  for (double t0 : burst_times) {
    const double amp =
        burst.amplitude * (1.0 + burst.amplitude_jitter * rng.uniform(-1.0, 1.0));
    double freqs[kCarriers], phases[kCarriers];
    for (int k = 0; k < kCarriers; ++k) {
      freqs[k] = rng.uniform(burst.band_lo, burst.band_hi);
      phases[k] = rng.uniform(0.0, kTwoPi);
    }
    const std::size_t i0 = static_cast<std::size_t>(std::llround(t0 * sample_rate));
    const std::size_t i1 = std::min(
        n, i0 + static_cast<std::size_t>(std::llround(burst.duration * sample_rate)));
    const double attack = std::min(kAttack, burst.duration / 3.0);
    const double norm = 1.0 / std::sqrt(static_cast<double>(kCarriers) / 2.0);
    for (std::size_t i = i0; i < i1; ++i) {
      const double tau = static_cast<double>(i - i0) / sample_rate;
      double env;
      if (tau < attack) {
        env = 0.5 * (1.0 - std::cos(3.141592653589793 * tau / attack));
      } else {
        env = 0.5 * (1.0 + std::cos(3.141592653589793 * (tau - attack) /
                                    (burst.duration - attack)));
      }
      double carrier = 0.0;
      const double t = static_cast<double>(i) / sample_rate;
      for (int k = 0; k < kCarriers; ++k) {
        carrier += std::sin(kTwoPi * freqs[k] * t + phases[k]);
      }
      const double v = 0.5 * amp * env * carrier * norm;
      ch0[i] += v;
      ch1[i] -= v;
    }
  }

  if (noise_floor > 0.0) {
    for (std::size_t i = 0; i < n; ++i) ch0[i] += noise_floor * rng.gaussian();
    for (std::size_t i = 0; i < n; ++i) ch1[i] += noise_floor * rng.gaussian();
  }

  return rec;
}

void write_recording_csv(const EmgRecording& recording, const std::string& path) {
  recording.validate();
  require(recording.channels.size() == 2, "write_recording_csv expects two channels");
  const std::size_t n = recording.channels[0].size();

  std::vector<std::size_t> label_idx;
  label_idx.reserve(recording.labels.size());
  for (double t : recording.labels) {
    label_idx.push_back(static_cast<std::size_t>(std::llround(t * recording.sample_rate)));
  }

  std::string out = "# sample_rate=" + std::to_string(recording.sample_rate) + "\n";
  out += "time,ch0,ch1,label\n";
  std::size_t next_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / recording.sample_rate;
    int flag = 0;
    if (next_label < label_idx.size() && label_idx[next_label] == i) {
      flag = 1;
      ++next_label;
    }
    out += csv::format_double(t);
    out += ',';
    out += csv::format_double(recording.channels[0][i]);
    out += ',';
    out += csv::format_double(recording.channels[1][i]);
    out += ',';
    out += static_cast<char>('0' + flag);
    out += '\n';
  }
  csv::write_file_atomic(path, out);
}

EmgRecording read_recording_csv(const std::string& path) {
  auto parsed = csv::parse_csv(csv::read_file(path));
  int sample_rate = 0;
  for (const auto& c : parsed.comments) {
    if (c.rfind("sample_rate=", 0) == 0) {
      sample_rate = static_cast<int>(csv::parse_long(c.substr(12)));
    }
  }
  if (sample_rate <= 0) throw std::runtime_error(path + ": missing '# sample_rate=' line");
  const bool has_label = parsed.header.size() == 4;
  if (parsed.header.size() < 3) throw std::runtime_error(path + ": expected time,ch0,ch1[,label]");

  EmgRecording rec;
  rec.sample_rate = sample_rate;
  rec.channels.assign(2, {});
  for (std::size_t r = 0; r < parsed.rows.size(); ++r) {
    const auto& row = parsed.rows[r];
    rec.channels[0].push_back(csv::parse_double(row[1]));
    rec.channels[1].push_back(csv::parse_double(row[2]));
    if (has_label && csv::parse_long(row[3]) == 1) {
      rec.labels.push_back(static_cast<double>(r) / sample_rate);
    }
  }
  rec.validate();
  return rec;
}

} // namespace drumsim::emg
