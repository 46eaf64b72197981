#pragma once

#include "drumsim/emg.hpp"
#include "drumsim/onset.hpp"
#include "drumsim/performer.hpp"
#include "drumsim/stick.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace drumsim::config {

struct GridSettings {
  std::vector<double> tempi = {90,  100, 110, 120, 130, 140, 150,
                               160, 170, 180, 190, 200, 210};
  int trials = 20;
  std::uint64_t seed = 42;
  double envelope_rate = 200.0;
  double alpha = 0.05;
  int measures = 4;
};

struct SynthSettings {
  int recordings = 10;
  int bursts_per_recording = 20;
  double spacing_min = 0.35;  // s between burst starts
  double spacing_max = 0.70;
  int sample_rate = 8000;
  double noise_floor = 0.02;
  std::uint64_t seed = 7;
  emg::BurstParams burst;
  emg::Interference interference;
};

struct BehaviorSettings {
  double tempo = 120.0;
  int resolution = 4;
  int loops = 4;
  double density_level = 0.3;
  std::uint64_t seed = 9;
  double rate_min = 2.0;
  double rate_max = 20.0;
  double chord_tail = 2.0;       // s the last chord keeps playing
  double hover_height = 0.0;     // static pose when no pose file is given
  double velocity_scale = 1.0;
};

// Whole-scenario configuration with embedded defaults. A config file is an
// INI-style overlay: [section] headers, key = value lines, '#' comments.
// Motif sections ([motif.<name>]) replace the default motif set when present.
struct ScenarioConfig {
  int version = 1;
  emg::FilterChainConfig chain;
  onset::DetectorConfig detector;
  double score_tolerance = 0.025;  // s, onset-match tolerance
  stick::StickParams stick_params;
  stick::PidGains gains;
  int emg_tune_steps = 200;
  performer::ElbowModel elbow;
  std::vector<performer::Motif> motifs = performer::default_motifs();
  GridSettings grid;
  SynthSettings synth;
  BehaviorSettings behavior;

  const performer::Motif& motif_by_name(const std::string& name) const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& content);

} // namespace drumsim::config
