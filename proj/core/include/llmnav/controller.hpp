#pragma once

#include <llmnav/geometry.hpp>
#include <llmnav/planner.hpp>
#include <llmnav/simulator.hpp>

#include <cstddef>
#include <numbers>
#include <string_view>

namespace llmnav::control {

inline constexpr double kSteeringLimit = std::numbers::pi / 5.0;
inline constexpr double kBrakingAngle = std::numbers::pi / 3.0;
inline constexpr double kReverseAngle = std::numbers::pi / 2.0;
inline constexpr double kDecayDistance = 1.2;
inline constexpr double kSpeedGain = 1.2;
inline constexpr double kReverseScale = 0.6;
inline constexpr double kArrivalDistance = 0.4;
inline constexpr double kArrivalHeading = std::numbers::pi / 3.0;
inline constexpr double kArrivalSpeed = 1.0;
inline constexpr double kGoalMargin = 0.5;

struct PidGains {
    double kp = 3.2;
    double ki = 0.1;
    double kd = 0.3;
    double steering_limit = kSteeringLimit;
    double integral_limit = 1.0;
};

struct TrackingErrors {
    double distance = 0.0;  ///< e_d, m
    double heading = 0.0;   ///< e_theta, rad in (-pi, pi]
};

struct ControllerState {
    double integral = 0.0;
    double prev_error = 0.0;
    std::size_t waypoint_index = 0;
    double v0 = 0.8;

    void reset_pid() noexcept {
        integral = 0.0;
        prev_error = 0.0;
    }
};

/// Distance to the target and wrapped bearing error. A coincident target has zero heading error.
TrackingErrors compute_errors(const Pose2& pose, Vec2 target);

/// Discrete PID on heading error; output clamped to +-steering_limit, integral clamped to
/// +-integral_limit. Updates `state.integral` and `state.prev_error`.
double pid_step(double heading_error, ControllerState& state, const PidGains& gains, double dt);

struct VelocityCommand {
    double v_base = 0.0;
    double steering = 0.0;
    bool reverse = false;
};

/// Distance decay * braking * 1.2 speed law, plus reverse mode when |e_theta| > pi/2.
///
/// Braking is floored at zero. In reverse mode the braking term is evaluated on the
/// rear-facing error (pi - |e_theta|) before the reverse rule is applied.
VelocityCommand modulate_velocity(const TrackingErrors& errors, double steering, double v0);

/// The reverse rule alone: v <- -0.6 v, delta <- -delta.
VelocityCommand apply_reverse(double v_base, double steering);

/// V_L = v (1 - tanh delta), V_R = v (1 + tanh delta).
sim::WheelCommand wheel_split(double v_base, double steering);

/// Spin about the wheel axis center toward the steering sign. motion_control adds it with
/// weight (1 - braking) so heading authority survives when the speed law brakes to zero.
sim::WheelCommand turn_in_place(double steering, double spin_speed);

/// e_d < 0.4 and |e_theta| < pi/3 and |v| < 1, all strict.
bool waypoint_reached(const TrackingErrors& errors, double speed);

struct ControllerConfig {
    PidGains gains;
    double v0 = 0.8;
    std::size_t max_steps = 4000;
    double goal_margin = kGoalMargin;
};

enum class MotionStatus { success, collision, timeout };

std::string_view to_string(MotionStatus s);

struct MotionOutcome {
    MotionStatus status = MotionStatus::timeout;
    std::size_t steps = 0;
    std::size_t waypoints_reached = 0;
    double traveled = 0.0;
    /// Distance from the final pose to the last waypoint.
    double final_error = 0.0;
    std::string collided_with;
};

/// Closed-loop tracking of `path` on `sim` until the last waypoint is reached, the robot
/// collides or the step budget runs out. Throws InputError for an empty path.
MotionOutcome motion_control(const planner::WaypointPath& path, sim::Simulator& sim,
                             const ControllerConfig& config = {});

}  // namespace llmnav::control
