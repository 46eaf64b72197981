#pragma once

#include "drumsim/emg.hpp"

#include <cstddef>
#include <vector>

namespace drumsim::onset {

struct OnsetEvent {
  double time = 0.0;      // seconds
  double velocity = 0.0;  // growth magnitude, >= 0
};

struct DetectorConfig {
  int num_bands = 8;
  int frame_size = 256;  // samples, power of two
  int hop = 64;          // samples
  double min_velocity = 2e-4;
  // Dead time after an emitted onset. The default rides out one whole
  // muscle-burst's worth of envelope fluctuation.
  double min_gap = 0.15;  // seconds

  void validate() const;
};

struct DetectionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
};

// Per-band power envelopes, bands x frames.
struct EnvelopeMatrix {
  std::size_t num_bands = 0;
  std::size_t num_frames = 0;
  std::vector<double> power;        // row-major, bands x frames
  std::vector<double> frame_times;  // frame start times, seconds

  double at(std::size_t band, std::size_t frame) const {
    return power[band * num_frames + frame];
  }
};

// Frame-wise spectral decomposition into bands whose widths double above a
// 62.5 Hz floor (bounded-Q layout). Hann-windowed frames; each cell is
// non-negative band power.
EnvelopeMatrix bounded_q_decompose(const emg::ActivationSignal& signal,
                                   const DetectorConfig& config);

// Growth function: per-frame half-wave-rectified band-power increase summed
// over bands. Onsets are local growth maxima above min_velocity with
// min_gap dead time. Times are strictly increasing.
std::vector<OnsetEvent> detect_onsets(const EnvelopeMatrix& bands, const DetectorConfig& config);

// End to end: conditioning chain then decomposition then peak picking.
std::vector<OnsetEvent> detect_from_recording(const emg::EmgRecording& recording,
                                              const emg::FilterChainConfig& chain,
                                              const DetectorConfig& config, int chan_a = 0,
                                              int chan_b = 1);

// Greedy earliest-first one-to-one matching within tolerance.
DetectionScore score_detection(const std::vector<OnsetEvent>& detected,
                               const std::vector<double>& labels, double tolerance);

std::string onsets_to_csv(const std::vector<OnsetEvent>& onsets);
std::vector<OnsetEvent> onsets_from_csv(const std::string& content);

} // namespace drumsim::onset
