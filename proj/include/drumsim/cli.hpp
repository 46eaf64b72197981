#pragma once

#include "drumsim/config.hpp"

#include <cstdint>
#include <string>

namespace drumsim::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitCheckFailed = 3;

// Synthesizes the labeled EMG corpus (recording_NNN.csv + manifest.csv).
int cmd_synth_dataset(const config::ScenarioConfig& cfg, const std::string& out_dir);

// Detects onsets on every corpus recording and scores against its labels;
// writes report.csv. With `check`, exits kExitCheckFailed when aggregate
// F1 < 0.90.
int cmd_eval_onsets(const config::ScenarioConfig& cfg, const std::string& corpus_dir,
                    const std::string& out_dir, bool check);

// One synchronization trial; writes reference.csv, strikes.csv, distance.csv.
int cmd_trial(const config::ScenarioConfig& cfg, const std::string& motif_name, double tempo,
              const std::string& condition, std::uint64_t seed, const std::string& out_dir);

// Full tempo grid; writes grid.csv (table analogue) and trials.csv. With
// `check`, verifies the expected condition trends and exits kExitCheckFailed
// when they do not hold.
int cmd_grid(const config::ScenarioConfig& cfg, const std::string& out_dir, int jobs, bool check);

// Autonomous-stick behaviors: playback | chordrate | densify. Reads the
// behavior's input file, applies pose gating, writes schedule.csv.
int cmd_behavior(const config::ScenarioConfig& cfg, const std::string& behavior_name,
                 const std::string& inputs_path, const std::string& pose_path,
                 const std::string& out_dir);

} // namespace drumsim::cli
