#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace drumsim::emg {

// Multichannel sampled EMG, dimensionless voltage-like amplitude.
// labels holds ground-truth onset times in seconds; empty means unlabeled.
struct EmgRecording {
  int sample_rate = 8000;
  std::vector<std::vector<double>> channels;
  std::vector<double> labels;

  double duration() const {
    return channels.empty() ? 0.0
                            : static_cast<double>(channels.front().size()) / sample_rate;
  }

  // Throws std::invalid_argument when an invariant is broken: channels of
  // unequal length, sample_rate < 2 kHz, labels not strictly increasing or
  // outside the recording.
  void validate() const;
};

struct FilterChainConfig {
  double diff_gain = 1.0;
  double maf_window = 0.020;    // seconds
  double lpf_cutoff = 520.0;    // Hz
  double notch_center = 180.0;  // Hz
  double notch_q = 1.5;
  double hpf_cutoff = 25.0;     // Hz
  double gate_threshold = 0.05;
  double gate_release = 0.050;  // seconds

  void validate(int sample_rate) const;
};

// Transfer-function coefficients with a0 normalized to 1:
//   y[n] = b0*x[n] + b1*x[n-1] + b2*x[n-2] - a1*y[n-1] - a2*y[n-2]
struct BiquadCoefficients {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  bool stable() const;
};

struct ActivationSignal {
  int sample_rate = 8000;
  std::vector<double> samples;  // all >= 0
};

enum class BiquadKind { lowpass, highpass, notch };

// out[i] = |gain * (a[i] - b[i])|. Lengths must match, gain > 0.
std::vector<double> differential_rectify(const std::vector<double>& chan_a,
                                         const std::vector<double>& chan_b, double gain);

// Trailing-window RMS; leading partial windows average the available samples.
std::vector<double> rms_moving_average(const std::vector<double>& signal, double window_seconds,
                                       int sample_rate);

// RBJ bilinear-transform designs. q is ignored for none of the kinds; use
// 1/sqrt(2) for Butterworth low/high pass.
BiquadCoefficients design_biquad(BiquadKind kind, double center_or_cutoff_hz, double q,
                                 int sample_rate);

// |H(e^{j 2 pi f / fs})|
double magnitude_response(const BiquadCoefficients& c, double freq_hz, int sample_rate);

// Single forward pass, direct form II transposed, zero initial state.
std::vector<double> biquad_filter(const std::vector<double>& signal,
                                  const BiquadCoefficients& c);

// Samples below threshold are zeroed unless within release_seconds after the
// last sample at or above threshold.
std::vector<double> noise_gate(const std::vector<double>& signal, double threshold,
                               double release_seconds, int sample_rate);

std::vector<double> clamp_nonnegative(std::vector<double> signal);

// Full conditioning chain, in order: differential rectify -> RMS MAF ->
// LPF -> notch -> HPF -> clamp at 0 -> noise gate.
ActivationSignal apply_chain(const EmgRecording& recording, int chan_a, int chan_b,
                             const FilterChainConfig& config);

struct BurstParams {
  double duration = 0.15;     // seconds
  double amplitude = 1.0;
  double band_lo = 60.0;      // Hz
  double band_hi = 300.0;     // Hz
  double amplitude_jitter = 0.3;  // burst amplitude drawn in [amp*(1-j), amp*(1+j)]
};

struct Interference {
  double line_hz = 60.0;
  // harmonic_amps[k] scales harmonic (k+1), i.e. the default puts its energy
  // at 180 Hz.
  std::vector<double> harmonic_amps = {0.0, 0.0, 0.25};
  // Fraction of the interference that survives differential amplification
  // (electrode imbalance); 0 means perfect common-mode cancellation.
  double imbalance = 0.15;
};

// Two-channel synthetic recording: bursts appear differentially (+/- half
// amplitude), interference is common mode up to `imbalance`, white noise is
// independent per channel. labels echoes burst_times. Deterministic per seed.
EmgRecording synth_emg(const std::vector<double>& burst_times, const BurstParams& burst,
                       const Interference& interference, double noise_floor,
                       std::uint64_t seed, int sample_rate = 8000, double tail_seconds = 0.3);

// CSV with a `# sample_rate=<Hz>` sidecar line and header time,ch0,ch1,label.
void write_recording_csv(const EmgRecording& recording, const std::string& path);
EmgRecording read_recording_csv(const std::string& path);

} // namespace drumsim::emg
