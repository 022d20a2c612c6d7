#pragma once

#include <llmnav/geometry.hpp>
#include <llmnav/worldmodel.hpp>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace llmnav::sim {

/// Hard cap on any configured wheel speed, m/s.
inline constexpr double kAbsoluteSpeedCap = 40.0;

struct RobotParams {
    double wheel_base = 0.5;
    double body_radius = 0.2;
    double max_wheel_speed = 1.0;
    double dt = 0.05;
};

/// Throws ConfigError unless all fields are positive and the speed cap is honored.
void validate(const RobotParams& params);

struct WheelCommand {
    double left = 0.0;
    double right = 0.0;
};

struct RobotState {
    Pose2 pose;
    WheelCommand wheels;
    double time = 0.0;
    /// Set when the integrator had to clamp the position back inside the bounds.
    bool wall_contact = false;

    double linear_speed() const noexcept { return 0.5 * (wheels.left + wheels.right); }
};

/// One unicycle integration step. Commands are clamped to +-max_wheel_speed.
/// Throws InputError for non-finite commands.
RobotState step(const RobotState& state, WheelCommand command, const RobotParams& params);

/// Same as step() but also clamps the position inside `bounds`, flagging wall contact.
RobotState step_within(const RobotState& state, WheelCommand command, const RobotParams& params,
                       const Rect& bounds);

struct CollisionReport {
    bool collided = false;
    /// Label of the first object hit, or "bounds".
    std::string with;
};

/// Disc footprint against every object footprint and the room bounds.
CollisionReport check_collision(const RobotState& state, const world::Scenario& scenario,
                                const RobotParams& params);

/// Pose as exposed at the tool boundary: position, heading and planar yaw quaternion (x, y, z, w).
struct RobotPose {
    Vec2 position;
    double heading = 0.0;
    std::array<double, 4> quaternion{0.0, 0.0, 0.0, 1.0};
};

std::array<double, 4> yaw_quaternion(double heading);

struct TrajectorySample {
    double time;
    double x;
    double y;
    double heading;
    double left;
    double right;
};

/// Append-only per-step record of an episode.
class TrajectoryLog {
public:
    void append(const RobotState& s);
    const std::vector<TrajectorySample>& samples() const noexcept { return samples_; }
    std::vector<Vec2> positions() const;
    /// Sum of segment lengths between consecutive samples.
    double traveled_length() const;
    void write_csv(std::ostream& out) const;

private:
    std::vector<TrajectorySample> samples_;
};

/// Owns one episode's robot state. Not shared between threads.
class Simulator {
public:
    Simulator(world::Scenario scenario, RobotParams params = {});
    Simulator(world::Scenario scenario, RobotParams params, Pose2 start);

    const world::Scenario& scenario() const noexcept { return scenario_; }
    const RobotParams& params() const noexcept { return params_; }
    const RobotState& state() const noexcept { return state_; }
    const TrajectoryLog& log() const noexcept { return log_; }

    /// Advances one timestep and returns the collision report for the new state.
    CollisionReport apply(WheelCommand command);

    /// Ground-truth pose. Throws LookupError for an unknown robot id.
    RobotPose get_robot_pose(int robot_id) const;

    CollisionReport collision() const { return check_collision(state_, scenario_, params_); }

private:
    world::Scenario scenario_;
    RobotParams params_;
    RobotState state_;
    TrajectoryLog log_;
};

}  // namespace llmnav::sim
