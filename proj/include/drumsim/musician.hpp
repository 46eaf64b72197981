#pragma once

#include "drumsim/emg.hpp"
#include "drumsim/onset.hpp"
#include "drumsim/stick.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace drumsim::musician {

struct PatternEvent {
  int slot = 0;
  double velocity = 1.0;  // (0,1]
};

struct RhythmPattern {
  int resolution = 4;  // slots per quarter
  int measures = 0;
  std::vector<PatternEvent> events;  // sorted by slot, one per slot

  int total_slots() const { return measures * 4 * resolution; }
  void validate() const;
};

struct ChordEvent {
  double time = 0.0;
  int tonal_center = 0;  // pitch class 0..11
};

struct DensityControl {
  double level = 0.0;  // [0,1]
};

struct ArmPose {
  double hover_height = 0.0;    // [0,1]; >= 1 keeps the stick off the head
  double velocity_scale = 1.0;  // (0,1]
};

struct PoseSample {
  double time = 0.0;
  ArmPose pose;
};

// Nearest-slot quantization; collisions keep the louder hit; velocities are
// normalized so the loudest is 1. Grid origin is t = 0.
RhythmPattern extract_pattern(const std::vector<onset::OnsetEvent>& onsets, double tempo,
                              int resolution);

// Same quantizer anchored at the first onset (it defines beat 1).
RhythmPattern quantize_seed(const std::vector<onset::OnsetEvent>& onsets, double tempo,
                            int resolution);

// Metronomic expansion of the pattern for `loops` repetitions.
std::vector<stick::ScheduledStrike> schedule_playback(const RhythmPattern& pattern, double tempo,
                                                      int loops);

// Linear pitch-class -> strike-rate map over rate_range (Hz, max <= 20).
double chord_to_rate(const ChordEvent& chord, double rate_min, double rate_max);

// Fixed-rate strike stream for each chord segment; the last chord runs until
// `end_time`.
std::vector<stick::ScheduledStrike> schedule_chord_rates(const std::vector<ChordEvent>& chords,
                                                         double rate_min, double rate_max,
                                                         double end_time,
                                                         double velocity = 0.7);

// Each empty slot becomes a hit with probability control.level (velocity
// uniform in [0.3, 0.7]); existing hits are untouched. level 0 is identity.
RhythmPattern densify(const RhythmPattern& pattern, const DensityControl& control,
                      std::uint64_t seed);

// level = clamp(mean amplitude over the trailing window / full_scale, [0,1]).
DensityControl density_from_activation(const emg::ActivationSignal& signal, double window_seconds,
                                       double full_scale = 1.0);

// Zero-order-hold pose lookup per strike: hover >= 1 drops the strike,
// otherwise velocity scales by velocity_scale * (1 - hover).
std::vector<stick::ScheduledStrike> gate_by_pose(const std::vector<stick::ScheduledStrike>& schedule,
                                                 const std::vector<PoseSample>& poses);

// Pattern file: `# resolution=<slots>,measures=<n>` then slot,velocity rows.
std::string pattern_to_csv(const RhythmPattern& pattern);
RhythmPattern pattern_from_csv(const std::string& content);

// Chord stream file: time,pitch_class.
std::string chords_to_csv(const std::vector<ChordEvent>& chords);
std::vector<ChordEvent> chords_from_csv(const std::string& content);

std::string schedule_to_csv(const std::vector<stick::ScheduledStrike>& schedule);
std::vector<stick::ScheduledStrike> schedule_from_csv(const std::string& content);

std::string poses_to_csv(const std::vector<PoseSample>& poses);
std::vector<PoseSample> poses_from_csv(const std::string& content);

} // namespace drumsim::musician
