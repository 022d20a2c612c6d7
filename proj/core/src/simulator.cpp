#include <llmnav/simulator.hpp>

#include <llmnav/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace llmnav::sim {

void validate(const RobotParams& p) {
    if (!(p.wheel_base > 0.0)) throw ConfigError("wheel_base must be positive");
    if (!(p.body_radius > 0.0)) throw ConfigError("body_radius must be positive");
    if (!(p.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(p.max_wheel_speed > 0.0) || p.max_wheel_speed > kAbsoluteSpeedCap)
        throw ConfigError("max_wheel_speed must lie in (0, 40] m/s");
}

RobotState step(const RobotState& state, WheelCommand command, const RobotParams& params) {
    if (!std::isfinite(command.left) || !std::isfinite(command.right))
        throw InputError("wheel command must be finite");
    const double cap = params.max_wheel_speed;
    const WheelCommand w{std::clamp(command.left, -cap, cap), std::clamp(command.right, -cap, cap)};
    const double v = 0.5 * (w.left + w.right);
    const double omega = (w.right - w.left) / params.wheel_base;
    const double theta = state.pose.heading;

    RobotState next = state;
    next.wheels = w;
    next.pose.position.x += v * std::cos(theta) * params.dt;
    next.pose.position.y += v * std::sin(theta) * params.dt;
    next.pose.heading = wrap_angle(theta + omega * params.dt);
    next.time = state.time + params.dt;
    next.wall_contact = false;
    return next;
}

RobotState step_within(const RobotState& state, WheelCommand command, const RobotParams& params,
                       const Rect& bounds) {
    RobotState next = step(state, command, params);
    const Vec2 p = next.pose.position;
    const Vec2 clamped{std::clamp(p.x, bounds.x_min, bounds.x_max), std::clamp(p.y, bounds.y_min, bounds.y_max)};
    if (clamped != p) {
        next.pose.position = clamped;
        next.wall_contact = true;
    }
    return next;
}

CollisionReport check_collision(const RobotState& state, const world::Scenario& scenario,
                                const RobotParams& params) {
    const Vec2 p = state.pose.position;
    const double r = params.body_radius;
    for (const auto& obj : scenario.objects) {
        const Rect& f = obj.footprint;
        const double dx = p.x - std::clamp(p.x, f.x_min, f.x_max);
        const double dy = p.y - std::clamp(p.y, f.y_min, f.y_max);
        if (dx * dx + dy * dy < r * r) return {true, obj.label};
    }
    const Rect& b = scenario.bounds;
    if (state.wall_contact || p.x - r < b.x_min || p.x + r > b.x_max || p.y - r < b.y_min || p.y + r > b.y_max)
        return {true, "bounds"};
    return {};
}

std::array<double, 4> yaw_quaternion(double heading) {
    return {0.0, 0.0, std::sin(0.5 * heading), std::cos(0.5 * heading)};
}

void TrajectoryLog::append(const RobotState& s) {
    samples_.push_back({s.time, s.pose.position.x, s.pose.position.y, s.pose.heading, s.wheels.left, s.wheels.right});
}

std::vector<Vec2> TrajectoryLog::positions() const {
    std::vector<Vec2> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.push_back({s.x, s.y});
    return out;
}

double TrajectoryLog::traveled_length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < samples_.size(); ++i)
        total += std::hypot(samples_[i].x - samples_[i - 1].x, samples_[i].y - samples_[i - 1].y);
    return total;
}

void TrajectoryLog::write_csv(std::ostream& out) const {
    out << "time,x,y,theta,v_left,v_right\n";
    char buf[256];
    for (const auto& s : samples_) {
        std::snprintf(buf, sizeof buf, "%.4f,%.6f,%.6f,%.6f,%.6f,%.6f\n", s.time, s.x, s.y, s.heading, s.left,
                      s.right);
        out << buf;
    }
}

Simulator::Simulator(world::Scenario scenario, RobotParams params)
    : Simulator(scenario, params, scenario.spawn) {}

Simulator::Simulator(world::Scenario scenario, RobotParams params, Pose2 start)
    : scenario_(std::move(scenario)), params_(params) {
    validate(params_);
    state_.pose = start;
    state_.pose.heading = wrap_angle(start.heading);
    log_.append(state_);
}

CollisionReport Simulator::apply(WheelCommand command) {
    state_ = step_within(state_, command, params_, scenario_.bounds);
    log_.append(state_);
    return collision();
}

RobotPose Simulator::get_robot_pose(int robot_id) const {
    if (robot_id != scenario_.robot_id)
        throw LookupError("unknown robot id " + std::to_string(robot_id) + " (available: " +
                          std::to_string(scenario_.robot_id) + ")");
    return {state_.pose.position, state_.pose.heading, yaw_quaternion(state_.pose.heading)};
}

}  // namespace llmnav::sim
