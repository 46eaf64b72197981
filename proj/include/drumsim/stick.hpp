#pragma once

#include "drumsim/onset.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace drumsim::stick {

// One-DoF rotational stick over a drum head. theta = 0 is horizontal; the
// head sits at drum_angle below the rest pose. Gravity torque is
// -gravity_torque_coeff * cos(theta).
struct StickParams {
  double inertia = 2.5e-4;             // kg m^2
  double length = 0.35;                // m, informational
  double gravity_torque_coeff = 0.0115;  // N m at horizontal
  double restitution = 0.5;            // in (0,1)
  double motor_torque_limit = 1.0;     // N m
  double drum_angle = -0.10;           // rad, contact plane
  double rest_angle = 0.35;            // rad
  double timestep = 1e-4;              // s, <= 1 ms

  void validate() const;
};

struct PidGains {
  double kp = 0.1;   // N m / rad
  double ki = 0.0;   // N m / (rad s)
  double kd = 0.001;  // N m s / rad
  double kp_min = 0.002;
  double kp_max = 3.5;

  void validate() const;
};

struct StickState {
  double theta = 0.0;           // rad
  double omega = 0.0;           // rad/s
  double integral_error = 0.0;  // rad s
  double time = 0.0;            // s
};

struct StrikeEvent {
  double time = 0.0;      // s
  double velocity = 0.0;  // |omega| at impact, rad/s, > 0
};

// Impacts slower than this are absorbed (the stick settles on the head)
// instead of bouncing; keeps resting contact from emitting micro-strikes.
inline constexpr double kMinStrikeSpeed = 0.2;  // rad/s

// Hover offset used by simulate_rebound's setpoint above the head.
inline constexpr double kReboundHover = 0.03;  // rad

// Thrown when a requested rebound interval lies outside what the kp range
// can produce; carries the achievable range for reporting.
class UnachievableIntervalError : public std::runtime_error {
 public:
  UnachievableIntervalError(double target, double min_interval, double max_interval);
  double target() const { return target_; }
  double min_interval() const { return min_interval_; }
  double max_interval() const { return max_interval_; }

 private:
  double target_, min_interval_, max_interval_;
};

// One semi-implicit Euler step of I*theta'' = tau_pid + tau_gravity with the
// PID torque clamped to +/- motor_torque_limit. Crossing the contact plane
// with omega < 0 reflects omega by -restitution, clamps theta to drum_angle
// and reports a StrikeEvent at the sub-step interpolated impact time; impacts
// below kMinStrikeSpeed come to rest without an event.
std::pair<StickState, std::optional<StrikeEvent>> step(const StickState& state,
                                                       const StickParams& params,
                                                       const PidGains& gains, double setpoint);

// Drop the stick onto the head at initial_strike_speed with the setpoint a
// small hover above the contact plane and return every strike in `duration`
// seconds. The interval between the first two strikes is the rebound
// interval for this kp.
std::vector<StrikeEvent> simulate_rebound(const StickParams& params, const PidGains& gains,
                                          double initial_strike_speed, double duration);

// First rebound interval measured by simulate_rebound; +inf when the stick
// never strikes twice.
double measure_rebound_interval(const StickParams& params, const PidGains& gains,
                                double initial_strike_speed);

// Bisection over kp in [kp_min, kp_max] to hit target_interval within 2%
// (internally converges to 0.1%). Throws UnachievableIntervalError when the
// target lies outside the endpoint intervals.
double calibrate_kp_for_interval(const StickParams& params, double target_interval,
                                 const PidGains& gains_template,
                                 double initial_strike_speed = 10.0);

enum class KpDirection { up, down };

// One EMG-onset increment: kp moves by (kp_max - kp_min)/steps_across_range,
// clamped to the range. Other gains unchanged.
PidGains emg_kp_update(const PidGains& gains, const onset::OnsetEvent& onset,
                       KpDirection direction, int steps_across_range);

struct ScheduledStrike {
  double time = 0.0;
  double velocity = 1.0;  // (0,1] scale on nominal_speed
};

// Drive a strike schedule through the physics: each command flicks the stick
// downward at nominal_speed * velocity; the commanded impact's rebound is
// absorbed (single-stroke catch) and the PID returns the stick to a hover
// setpoint between commands. Returns the acoustic strikes that occurred.
std::vector<StrikeEvent> play_schedule(const std::vector<ScheduledStrike>& schedule,
                                       const StickParams& params, const PidGains& gains,
                                       double nominal_speed, double duration);

std::string strikes_to_csv(const std::vector<StrikeEvent>& strikes);
std::vector<StrikeEvent> strikes_from_csv(const std::string& content);

} // namespace drumsim::stick
