#include "drumsim/stick.hpp"

#include "drumsim/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace drumsim::stick {

namespace {
void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
} // namespace

void StickParams::validate() const {
  require(inertia > 0.0, "StickParams.inertia must be > 0");
  require(restitution > 0.0 && restitution < 1.0, "StickParams.restitution must be in (0,1)");
  require(timestep > 0.0 && timestep <= 1e-3, "StickParams.timestep must be in (0, 1 ms]");
  require(drum_angle < rest_angle, "StickParams requires drum_angle < rest_angle");
  require(motor_torque_limit > 0.0, "StickParams.motor_torque_limit must be > 0");
  require(gravity_torque_coeff >= 0.0, "StickParams.gravity_torque_coeff must be >= 0");
}

void PidGains::validate() const {
  require(kp >= 0.0 && ki >= 0.0 && kd >= 0.0, "PidGains must be >= 0");
  require(kp_min <= kp && kp <= kp_max, "PidGains.kp must lie in [kp_min, kp_max]");
  require(kp_min >= 0.0, "PidGains.kp_min must be >= 0");
}

UnachievableIntervalError::UnachievableIntervalError(double target, double min_interval,
                                                     double max_interval)
    : std::runtime_error("target rebound interval " + csv::format_double(target) +
                         " s outside achievable range [" + csv::format_double(min_interval) +
                         ", " + csv::format_double(max_interval) + "] s"),
      target_(target),
      min_interval_(min_interval),
      max_interval_(max_interval) {}

std::pair<StickState, std::optional<StrikeEvent>> step(const StickState& state,
                                                       const StickParams& params,
                                                       const PidGains& gains, double setpoint) {
  if (!std::isfinite(state.theta) || !std::isfinite(state.omega)) {
    throw std::runtime_error("stick simulation fault: non-finite state");
  }

  const double dt = params.timestep;
  const double error = setpoint - state.theta;

  StickState next = state;
  next.integral_error = state.integral_error + error * dt;

  double tau = gains.kp * error + gains.ki * next.integral_error - gains.kd * state.omega;
  tau = std::clamp(tau, -params.motor_torque_limit, params.motor_torque_limit);
  tau += -params.gravity_torque_coeff * std::cos(state.theta);

  next.omega = state.omega + dt * tau / params.inertia;
  next.theta = state.theta + dt * next.omega;
  next.time = state.time + dt;

  std::optional<StrikeEvent> strike;
  if (next.theta < params.drum_angle && next.omega < 0.0) {
    const double denom = state.theta - next.theta;
    const double frac =
        denom > 0.0 ? std::clamp((state.theta - params.drum_angle) / denom, 0.0, 1.0) : 1.0;
    const double impact_time = state.time + frac * dt;
    const double speed = -next.omega;
    next.theta = params.drum_angle;
    if (speed >= kMinStrikeSpeed) {
      next.omega = params.restitution * speed;
      strike = StrikeEvent{impact_time, speed};
    } else {
      next.omega = 0.0;
    }
  }
  return {next, strike};
}

std::vector<StrikeEvent> simulate_rebound(const StickParams& params, const PidGains& gains,
                                          double initial_strike_speed, double duration) {
  params.validate();
  gains.validate();
  require(duration > 0.0, "simulate_rebound: duration must be > 0");
  require(initial_strike_speed > 0.0, "simulate_rebound: strike speed must be > 0");

  const double setpoint = params.drum_angle + kReboundHover;
  StickState state;
  state.theta = params.drum_angle + 1e-3;
  state.omega = -initial_strike_speed;

  std::vector<StrikeEvent> strikes;
  const long steps = std::llround(duration / params.timestep);
  for (long i = 0; i < steps; ++i) {
    auto [next, strike] = step(state, params, gains, setpoint);
    state = next;
    if (strike) strikes.push_back(*strike);
  }
  return strikes;
}

double measure_rebound_interval(const StickParams& params, const PidGains& gains,
                                double initial_strike_speed) {
  // 0.5 s comfortably exceeds the gravity-ballistic bound on one flight.
  const auto strikes = simulate_rebound(params, gains, initial_strike_speed, 0.5);
  if (strikes.size() < 2) return std::numeric_limits<double>::infinity();
  return strikes[1].time - strikes[0].time;
}

double calibrate_kp_for_interval(const StickParams& params, double target_interval,
                                 const PidGains& gains_template, double initial_strike_speed) {
  params.validate();
  gains_template.validate();
  require(target_interval > 0.0, "calibrate_kp_for_interval: target must be > 0");

  auto interval_at = [&](double kp) {
    PidGains g = gains_template;
    g.kp = kp;
    return measure_rebound_interval(params, g, initial_strike_speed);
  };

  // Interval is monotone decreasing in kp.
  const double interval_lo_kp = interval_at(gains_template.kp_min);  // longest
  const double interval_hi_kp = interval_at(gains_template.kp_max);  // shortest
  if (!(target_interval <= interval_lo_kp && target_interval >= interval_hi_kp)) {
    throw UnachievableIntervalError(target_interval, interval_hi_kp, interval_lo_kp);
  }

  double lo = gains_template.kp_min, hi = gains_template.kp_max;
  double best_kp = 0.5 * (lo + hi);
  for (int iter = 0; iter < 60; ++iter) {
    best_kp = 0.5 * (lo + hi);
    const double interval = interval_at(best_kp);
    if (std::abs(interval - target_interval) <= 0.001 * target_interval) break;
    if (interval > target_interval) {
      lo = best_kp;  // interval too long -> stiffen
    } else {
      hi = best_kp;
    }
  }
  return best_kp;
}

PidGains emg_kp_update(const PidGains& gains, const onset::OnsetEvent&, KpDirection direction,
                       int steps_across_range) {
  require(steps_across_range >= 1, "emg_kp_update: steps_across_range must be >= 1");
  PidGains out = gains;
  const double delta = (gains.kp_max - gains.kp_min) / static_cast<double>(steps_across_range);
  out.kp = std::clamp(gains.kp + (direction == KpDirection::up ? delta : -delta), gains.kp_min,
                      gains.kp_max);
  return out;
}

std::vector<StrikeEvent> play_schedule(const std::vector<ScheduledStrike>& schedule,
                                       const StickParams& params, const PidGains& gains,
                                       double nominal_speed, double duration) {
  params.validate();
  gains.validate();
  require(nominal_speed > 0.0, "play_schedule: nominal_speed must be > 0");

  const double hover = 0.15;
  const double setpoint = params.drum_angle + hover;
  StickState state;
  state.theta = setpoint;

  std::vector<StrikeEvent> strikes;
  std::size_t next_cmd = 0;
  bool absorb_next_impact = false;
  const long steps = std::llround(duration / params.timestep);
  for (long i = 0; i < steps; ++i) {
    while (next_cmd < schedule.size() && schedule[next_cmd].time <= state.time) {
      const double v = std::clamp(schedule[next_cmd].velocity, 0.0, 1.0);
      if (v > 0.0) {
        state.omega = -nominal_speed * v;
        absorb_next_impact = true;
      }
      ++next_cmd;
    }
    auto [next, strike] = step(state, params, gains, setpoint);
    state = next;
    if (strike) {
      strikes.push_back(*strike);
      if (absorb_next_impact) {
        // Single-stroke catch: the motor soaks up the commanded rebound.
        state.omega = 0.0;
        absorb_next_impact = false;
      }
    }
  }
  return strikes;
}

std::string strikes_to_csv(const std::vector<StrikeEvent>& strikes) {
  csv::TimedValueSeries series;
  for (const auto& s : strikes) {
    series.times.push_back(s.time);
    series.values.push_back(s.velocity);
  }
  return csv::to_time_value_csv(series, "velocity");
}

std::vector<StrikeEvent> strikes_from_csv(const std::string& content) {
  const auto series = csv::from_time_value_csv(content);
  std::vector<StrikeEvent> out(series.times.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {series.times[i], series.values[i]};
  return out;
}

} // namespace drumsim::stick
