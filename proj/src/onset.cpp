#include "drumsim/onset.hpp"

#include "drumsim/csv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drumsim::onset {

namespace {

constexpr double kPi = 3.141592653589793238462643;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

// In-place iterative radix-2 FFT.
void fft(std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = re.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (std::size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::size_t a = i + k, b = i + k + len / 2;
        const double xr = re[b] * cr - im[b] * ci;
        const double xi = re[b] * ci + im[b] * cr;
        re[b] = re[a] - xr;
        im[b] = im[a] - xi;
        re[a] += xr;
        im[a] += xi;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

// Band edges: 0, 62.5, then each band doubles the previous width, capped at
// Nyquist. Returns num_bands+1 edges.
std::vector<double> band_edges(int num_bands, double nyquist) {
  std::vector<double> edges(static_cast<std::size_t>(num_bands) + 1);
  edges[0] = 0.0;
  double width = 62.5;
  for (int b = 0; b < num_bands; ++b) {
    edges[static_cast<std::size_t>(b) + 1] = std::min(edges[b] + width, nyquist);
    width *= 2.0;
  }
  edges.back() = nyquist;
  return edges;
}

} // namespace

void DetectorConfig::validate() const {
  require(num_bands >= 1, "DetectorConfig.num_bands must be >= 1");
  require(is_pow2(frame_size), "DetectorConfig.frame_size must be a power of two");
  require(hop >= 1, "DetectorConfig.hop must be >= 1");
  require(hop <= frame_size, "DetectorConfig.hop must be <= frame_size");
  require(min_gap >= 0.0, "DetectorConfig.min_gap must be >= 0");
  require(min_velocity >= 0.0, "DetectorConfig.min_velocity must be >= 0");
}

EnvelopeMatrix bounded_q_decompose(const emg::ActivationSignal& signal,
                                   const DetectorConfig& config) {
  config.validate();
  const std::size_t n = signal.samples.size();
  const std::size_t frame = static_cast<std::size_t>(config.frame_size);
  const std::size_t hop = static_cast<std::size_t>(config.hop);
  require(n >= frame, "bounded_q_decompose: signal shorter than one frame");

  const std::size_t frames = (n - frame) / hop + 1;
  const std::size_t bands = static_cast<std::size_t>(config.num_bands);
  const double fs = signal.sample_rate;
  const auto edges = band_edges(config.num_bands, fs / 2.0);

  // Precompute Hann window and bin->band map (bin frequency k*fs/N).
  std::vector<double> window(frame);
  for (std::size_t i = 0; i < frame; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                      static_cast<double>(frame)));
  }
  const std::size_t half = frame / 2;
  std::vector<int> bin_band(half + 1, -1);
  for (std::size_t k = 0; k <= half; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(frame);
    for (std::size_t b = 0; b < bands; ++b) {
      if (f >= edges[b] && (f < edges[b + 1] || (b + 1 == bands && f <= edges[b + 1]))) {
        bin_band[k] = static_cast<int>(b);
        break;
      }
    }
  }

  EnvelopeMatrix out;
  out.num_bands = bands;
  out.num_frames = frames;
  out.power.assign(bands * frames, 0.0);
  out.frame_times.resize(frames);

  std::vector<double> re(frame), im(frame);
  const double norm = 1.0 / (static_cast<double>(frame) * static_cast<double>(frame));
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * hop;
    out.frame_times[f] = static_cast<double>(start) / fs;
    for (std::size_t i = 0; i < frame; ++i) {
      re[i] = signal.samples[start + i] * window[i];
      im[i] = 0.0;
    }
    fft(re, im);
    for (std::size_t k = 0; k <= half; ++k) {
      const int b = bin_band[k];
      if (b < 0) continue;
      const double p = (re[k] * re[k] + im[k] * im[k]) * norm;
      out.power[static_cast<std::size_t>(b) * frames + f] += p;
    }
  }
  return out;
}

std::vector<OnsetEvent> detect_onsets(const EnvelopeMatrix& bands, const DetectorConfig& config) {
  config.validate();
  require(bands.num_frames > 0 && bands.num_bands > 0, "detect_onsets: empty envelope matrix");

  const std::size_t frames = bands.num_frames;
  std::vector<double> growth(frames, 0.0);
  for (std::size_t b = 0; b < bands.num_bands; ++b) {
    const double* row = bands.power.data() + b * frames;
    growth[0] += row[0];
    for (std::size_t f = 1; f < frames; ++f) {
      const double d = row[f] - row[f - 1];
      if (d > 0.0) growth[f] += d;
    }
  }

  std::vector<OnsetEvent> out;
  double last_time = -1e300;
  for (std::size_t f = 0; f < frames; ++f) {
    if (growth[f] < config.min_velocity) continue;
    const bool rising = f == 0 || growth[f] >= growth[f - 1];
    const bool falling = f + 1 == frames || growth[f] > growth[f + 1];
    if (!(rising && falling)) continue;
    const double t = bands.frame_times[f];
    if (t - last_time < config.min_gap) continue;
    out.push_back({t, growth[f]});
    last_time = t;
  }
  return out;
}

std::vector<OnsetEvent> detect_from_recording(const emg::EmgRecording& recording,
                                              const emg::FilterChainConfig& chain,
                                              const DetectorConfig& config, int chan_a,
                                              int chan_b) {
  const auto activation = emg::apply_chain(recording, chan_a, chan_b, chain);
  const auto bands = bounded_q_decompose(activation, config);
  return detect_onsets(bands, config);
}

DetectionScore score_detection(const std::vector<OnsetEvent>& detected,
                               const std::vector<double>& labels, double tolerance) {
  require(tolerance > 0.0, "score_detection: tolerance must be > 0");

  DetectionScore s;
  std::size_t li = 0;
  for (const auto& d : detected) {
    while (li < labels.size() && labels[li] < d.time - tolerance) {
      ++li;
      ++s.false_negatives;
    }
    if (li < labels.size() && std::abs(labels[li] - d.time) <= tolerance) {
      ++s.true_positives;
      ++li;
    } else {
      ++s.false_positives;
    }
  }
  s.false_negatives += static_cast<int>(labels.size() - li);

  const int tp = s.true_positives;
  if (tp + s.false_positives > 0) {
    s.precision = static_cast<double>(tp) / (tp + s.false_positives);
  } else {
    s.precision = labels.empty() ? 1.0 : 0.0;
  }
  if (tp + s.false_negatives > 0) {
    s.recall = static_cast<double>(tp) / (tp + s.false_negatives);
  } else {
    s.recall = detected.empty() ? 1.0 : 0.0;
  }
  s.f1 = (s.precision + s.recall > 0.0)
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

std::string onsets_to_csv(const std::vector<OnsetEvent>& onsets) {
  csv::TimedValueSeries series;
  for (const auto& o : onsets) {
    series.times.push_back(o.time);
    series.values.push_back(o.velocity);
  }
  return csv::to_time_value_csv(series, "velocity");
}

std::vector<OnsetEvent> onsets_from_csv(const std::string& content) {
  const auto series = csv::from_time_value_csv(content);
  std::vector<OnsetEvent> out(series.times.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {series.times[i], series.values[i]};
  return out;
}

} // namespace drumsim::onset
