#pragma once

#include "drumsim/stick.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace drumsim::performer {

// Downward strike speed a relaxed full-accent elbow stroke produces; accents
// scale it. Reference envelopes use the same scale so a noise-free trial can
// match the reference exactly.
inline constexpr double kNominalStrikeSpeed = 10.0;  // rad/s

// One 4/4 measure on a grid of `subdivision` slots per quarter note.
struct Motif {
  std::string name;
  int subdivision = 4;            // slots per quarter
  std::vector<bool> pattern;      // length 4*subdivision, at least one hit
  std::vector<double> accents;    // empty, or per-slot weights in (0,1]

  int slots() const { return 4 * subdivision; }
  void validate() const;
};

enum class Condition { spring, electromechanical };

const char* condition_name(Condition c);
Condition condition_from_name(const std::string& name);

struct TrialSpec {
  Motif motif;
  double tempo = 120.0;  // BPM, within the study grid [90, 210]
  Condition condition = Condition::electromechanical;
  int measures_reference = 2;
  int measures_performed = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ElbowModel {
  double max_stroke_rate = 9.5;         // Hz
  double timing_jitter_sigma = 0.005;   // s
  double velocity_jitter_sigma = 0.05;  // fraction

  void validate() const;
};

enum class StrokeType { elbow, bounce };

struct PlannedStroke {
  double time = 0.0;    // ideal onset time, s
  double accent = 1.0;
  StrokeType type = StrokeType::elbow;
  double ioi_before = 0.0;  // s; 0 for the first hit
};

struct StrokePlan {
  std::vector<PlannedStroke> strokes;
  // Shortest inter-onset interval that must come from stick rebound;
  // 0 when every hit is elbow-initiated.
  double required_rebound_interval = 0.0;

  bool needs_bounce() const { return required_rebound_interval > 0.0; }
};

class InfeasiblePlanError : public std::runtime_error {
 public:
  InfeasiblePlanError(double required_interval, double floor_interval);
  double required_interval() const { return required_; }
  double floor_interval() const { return floor_; }

 private:
  double required_, floor_;
};

// Exact metronomic onset times for `measures` repetitions.
std::vector<double> render_reference(const Motif& motif, double tempo, int measures);

// Same times plus per-hit accent weights (1.0 where accents are omitted).
struct ReferenceEvents {
  std::vector<double> times;
  std::vector<double> accents;
};
ReferenceEvents render_reference_events(const Motif& motif, double tempo, int measures);

// Splits runs of hits faster than the elbow limit into alternating
// elbow/bounce strokes. Throws InfeasiblePlanError when a hit interval is
// shorter than half the sustainable elbow period (unreachable even with a
// bounce between elbow strokes).
StrokePlan plan_strokes(const Motif& motif, double tempo, const ElbowModel& elbow,
                        int measures = 1);

// Runs one synchronization trial. Electromechanical: kp is calibrated to the
// plan's required rebound interval and reached through emg_kp_update steps.
// Spring: kp fixed where the spring's natural interval sits (16ths at
// 210 bpm). Elbow strokes get seeded Gaussian timing/velocity jitter; bounce
// strokes are produced by the rebound physics after their priming stroke.
std::vector<stick::StrikeEvent> perform_trial(const TrialSpec& spec, const ElbowModel& elbow,
                                              const stick::StickParams& params,
                                              const stick::PidGains& gains_template,
                                              int emg_tune_steps = 200);

// 16th-note interval at 210 bpm; the spring prosthesis is tuned here.
inline constexpr double kSpringNaturalInterval = 60.0 / (210.0 * 4.0);

// The five study motifs.
std::vector<Motif> default_motifs();

} // namespace drumsim::performer
