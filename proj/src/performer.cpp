#include "drumsim/performer.hpp"

#include "drumsim/rng.hpp"

#include <algorithm>
#include <cmath>

namespace drumsim::performer {

namespace {
void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
} // namespace

void Motif::validate() const {
  require(subdivision >= 1, "Motif.subdivision must be >= 1");
  require(static_cast<int>(pattern.size()) == slots(),
          "Motif.pattern length must be 4*subdivision");
  require(std::any_of(pattern.begin(), pattern.end(), [](bool b) { return b; }),
          "Motif must contain at least one hit");
  if (!accents.empty()) {
    require(accents.size() == pattern.size(), "Motif.accents length must match pattern");
    for (double a : accents) {
      require(a > 0.0 && a <= 1.0, "Motif accent weights must be in (0,1]");
    }
  }
}

const char* condition_name(Condition c) {
  return c == Condition::spring ? "spring" : "electromechanical";
}

Condition condition_from_name(const std::string& name) {
  if (name == "spring") return Condition::spring;
  if (name == "electromechanical" || name == "electro") return Condition::electromechanical;
  throw std::invalid_argument("unknown condition '" + name +
                              "' (expected spring|electromechanical)");
}

void TrialSpec::validate() const {
  motif.validate();
  require(tempo >= 90.0 && tempo <= 210.0, "TrialSpec.tempo must be within the 90-210 bpm grid");
  require(measures_reference >= 1, "TrialSpec.measures_reference must be >= 1");
  require(measures_performed >= 1, "TrialSpec.measures_performed must be >= 1");
}

void ElbowModel::validate() const {
  require(max_stroke_rate > 0.0, "ElbowModel.max_stroke_rate must be > 0");
  require(timing_jitter_sigma >= 0.0, "ElbowModel.timing_jitter_sigma must be >= 0");
  require(velocity_jitter_sigma >= 0.0, "ElbowModel.velocity_jitter_sigma must be >= 0");
}

InfeasiblePlanError::InfeasiblePlanError(double required_interval, double floor_interval)
    : std::runtime_error("inter-onset interval " + std::to_string(required_interval) +
                         " s is below the bounce-assisted elbow floor of " +
                         std::to_string(floor_interval) + " s"),
      required_(required_interval),
      floor_(floor_interval) {}

std::vector<double> render_reference(const Motif& motif, double tempo, int measures) {
  return render_reference_events(motif, tempo, measures).times;
}

ReferenceEvents render_reference_events(const Motif& motif, double tempo, int measures) {
  motif.validate();
  require(tempo > 0.0, "render_reference: tempo must be > 0");
  require(measures >= 1, "render_reference: measures must be >= 1");

  const double slot_duration = 60.0 / (tempo * motif.subdivision);
  const int slots = motif.slots();
  ReferenceEvents out;
  for (int m = 0; m < measures; ++m) {
    for (int s = 0; s < slots; ++s) {
      if (!motif.pattern[static_cast<std::size_t>(s)]) continue;
      out.times.push_back((static_cast<double>(m) * slots + s) * slot_duration);
      out.accents.push_back(motif.accents.empty()
                                ? 1.0
                                : motif.accents[static_cast<std::size_t>(s)]);
    }
  }
  return out;
}

StrokePlan plan_strokes(const Motif& motif, double tempo, const ElbowModel& elbow, int measures) {
  elbow.validate();
  const auto ref = render_reference_events(motif, tempo, measures);
  const double elbow_period = 1.0 / elbow.max_stroke_rate;
  // Grid arithmetic sits exactly on the comparison boundary at some tempi;
  // a 0.1 ms epsilon keeps "equal" intervals on the sustainable side.
  const double eps = 1e-4;

  StrokePlan plan;
  plan.strokes.reserve(ref.times.size());
  double last_elbow_time = -1e300;
  for (std::size_t i = 0; i < ref.times.size(); ++i) {
    PlannedStroke s;
    s.time = ref.times[i];
    s.accent = ref.accents[i];
    s.ioi_before = i == 0 ? 0.0 : ref.times[i] - ref.times[i - 1];
    const bool fast = i > 0 && s.ioi_before < elbow_period - eps;
    if (fast && plan.strokes.back().type == StrokeType::elbow) {
      s.type = StrokeType::bounce;
      if (plan.required_rebound_interval == 0.0 ||
          s.ioi_before < plan.required_rebound_interval) {
        plan.required_rebound_interval = s.ioi_before;
      }
    } else {
      // Every other hit in a fast run is elbow-primed, so the binding
      // constraint is the elbow-to-elbow gap (two fast intervals).
      s.type = StrokeType::elbow;
      if (s.time - last_elbow_time < elbow_period - eps) {
        throw InfeasiblePlanError(s.ioi_before, 0.5 * elbow_period);
      }
      last_elbow_time = s.time;
    }
    plan.strokes.push_back(s);
  }
  return plan;
}

namespace {

double tune_kp_via_emg(const stick::PidGains& gains_template, double kp_target,
                       int emg_tune_steps) {
  // The EMG loop walks kp toward the calibrated value one onset at a time;
  // it lands on the step lattice nearest the target.
  stick::PidGains g = gains_template;
  const double step =
      (g.kp_max - g.kp_min) / static_cast<double>(emg_tune_steps);
  const stick::KpDirection dir =
      kp_target >= g.kp ? stick::KpDirection::up : stick::KpDirection::down;
  const int max_onsets = 4 * emg_tune_steps;
  for (int i = 0; i < max_onsets && std::abs(g.kp - kp_target) > 0.5 * step; ++i) {
    const double before = g.kp;
    g = stick::emg_kp_update(g, onset::OnsetEvent{static_cast<double>(i), 1.0}, dir,
                             emg_tune_steps);
    if (g.kp == before) break;  // clamped at a range end
  }
  return g.kp;
}

} // namespace

std::vector<stick::StrikeEvent> perform_trial(const TrialSpec& spec, const ElbowModel& elbow,
                                              const stick::StickParams& params,
                                              const stick::PidGains& gains_template,
                                              int emg_tune_steps) {
  spec.validate();
  elbow.validate();
  params.validate();
  gains_template.validate();
  require(emg_tune_steps >= 1, "perform_trial: emg_tune_steps must be >= 1");

  const StrokePlan plan =
      plan_strokes(spec.motif, spec.tempo, elbow, spec.measures_performed);

  stick::PidGains gains = gains_template;
  if (spec.condition == Condition::spring) {
    gains.kp = stick::calibrate_kp_for_interval(params, kSpringNaturalInterval, gains_template,
                                                kNominalStrikeSpeed);
  } else if (plan.needs_bounce()) {
    const double kp_star = stick::calibrate_kp_for_interval(
        params, plan.required_rebound_interval, gains_template, kNominalStrikeSpeed);
    gains.kp = tune_kp_via_emg(gains_template, kp_star, emg_tune_steps);
  }

  Rng rng(spec.seed);
  std::vector<stick::StrikeEvent> strikes;
  strikes.reserve(plan.strokes.size());

  double last_elbow_time = 0.0;
  double last_elbow_speed = kNominalStrikeSpeed;
  for (const auto& stroke : plan.strokes) {
    if (stroke.type == StrokeType::elbow) {
      const double t = stroke.time + rng.gaussian(0.0, elbow.timing_jitter_sigma);
      const double scale =
          std::clamp(stroke.accent * (1.0 + rng.gaussian(0.0, elbow.velocity_jitter_sigma)),
                     0.05, 1.5);
      const double speed = kNominalStrikeSpeed * scale;
      strikes.push_back({t, speed});
      last_elbow_time = t;
      last_elbow_speed = speed;
    } else {
      // The bounce rides the physics of the stroke that primed it.
      const double window = std::max(0.35, 2.5 * stroke.ioi_before);
      const auto rebound = stick::simulate_rebound(params, gains, last_elbow_speed, window);
      if (rebound.size() < 2) {
        throw std::runtime_error("perform_trial: rebound produced no second strike");
      }
      const double offset = rebound[1].time - rebound[0].time;
      strikes.push_back({last_elbow_time + offset, rebound[1].velocity});
    }
  }

  std::sort(strikes.begin(), strikes.end(),
            [](const auto& a, const auto& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < strikes.size(); ++i) {
    if (strikes[i].time <= strikes[i - 1].time) {
      strikes[i].time = std::nextafter(strikes[i - 1].time, 1e300);
    }
  }
  return strikes;
}

std::vector<Motif> default_motifs() {
  auto grid = [](const std::string& s) {
    std::vector<bool> out;
    out.reserve(s.size());
    for (char c : s) out.push_back(c == '1');
    return out;
  };

  std::vector<Motif> motifs;

  // Off-beat 16ths are written at the stick's natural bounce ratio (a double
  // stroke's second note lands near 0.42x its primer), so the reference is
  // playable as written at every tempo.
  constexpr double kBounceAccent = 0.42;

  Motif m;
  m.name = "straight_8ths";
  m.subdivision = 2;
  m.pattern = grid("11111111");
  motifs.push_back(m);

  m = {};
  m.name = "straight_16ths";
  m.subdivision = 4;
  m.pattern = grid("1111111111111111");
  m.accents.assign(16, 1.0);
  for (int s = 1; s < 16; s += 2) m.accents[static_cast<std::size_t>(s)] = kBounceAccent;
  motifs.push_back(m);

  m = {};
  m.name = "eighth_two_sixteenths";
  m.subdivision = 4;
  m.pattern = grid("1011101110111011");
  m.accents.assign(16, 1.0);
  for (int s = 3; s < 16; s += 4) m.accents[static_cast<std::size_t>(s)] = kBounceAccent;
  motifs.push_back(m);

  m = {};
  m.name = "double_stroke_roll";
  m.subdivision = 4;
  m.pattern = grid("1111111111111111");
  m.accents.assign(16, 1.0);
  for (int s = 1; s < 16; s += 2) m.accents[static_cast<std::size_t>(s)] = kBounceAccent;
  motifs.push_back(m);

  // Paradiddle accents on the beat; doubles inherit their primer's weight.
  m = {};
  m.name = "accented_paradiddle";
  m.subdivision = 4;
  m.pattern = grid("1111111111111111");
  m.accents.assign(16, 1.0);
  for (int s = 2; s < 16; s += 4) m.accents[static_cast<std::size_t>(s)] = 0.7;
  for (int s = 1; s < 16; s += 4) m.accents[static_cast<std::size_t>(s)] = kBounceAccent;
  for (int s = 3; s < 16; s += 4) m.accents[static_cast<std::size_t>(s)] = 0.7 * kBounceAccent;
  motifs.push_back(m);

  return motifs;
}

} // namespace drumsim::performer
