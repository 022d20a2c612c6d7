#include <llmnav/controller.hpp>

#include <llmnav/error.hpp>

#include <algorithm>
#include <cmath>

namespace llmnav::control {

TrackingErrors compute_errors(const Pose2& pose, Vec2 target) {
    if (!std::isfinite(target.x) || !std::isfinite(target.y)) throw InputError("target must be finite");
    const double dx = target.x - pose.position.x;
    const double dy = target.y - pose.position.y;
    TrackingErrors e;
    e.distance = std::hypot(dx, dy);
    e.heading = (dx == 0.0 && dy == 0.0) ? 0.0 : wrap_angle(std::atan2(dy, dx) - pose.heading);
    return e;
}

double pid_step(double heading_error, ControllerState& state, const PidGains& gains, double dt) {
    if (!(dt > 0.0)) throw InputError("dt must be positive");
    state.integral = std::clamp(state.integral + heading_error * dt, -gains.integral_limit, gains.integral_limit);
    const double derivative = (heading_error - state.prev_error) / dt;
    state.prev_error = heading_error;
    const double u = gains.kp * heading_error + gains.ki * state.integral + gains.kd * derivative;
    return std::clamp(u, -gains.steering_limit, gains.steering_limit);
}

VelocityCommand apply_reverse(double v_base, double steering) {
    return {-kReverseScale * v_base, -steering, true};
}

VelocityCommand modulate_velocity(const TrackingErrors& errors, double steering, double v0) {
    if (!(v0 > 0.0)) throw InputError("base speed v0 must be positive");
    const double magnitude = std::abs(errors.heading);
    const double decay = std::min(errors.distance / kDecayDistance, 1.0);
    if (magnitude > kReverseAngle) {
        const double rear_error = std::numbers::pi - magnitude;
        const double braking = std::max(0.0, 1.0 - rear_error / kBrakingAngle);
        return apply_reverse(v0 * decay * braking * kSpeedGain, steering);
    }
    const double braking = std::max(0.0, 1.0 - magnitude / kBrakingAngle);
    return {v0 * decay * braking * kSpeedGain, steering, false};
}

sim::WheelCommand wheel_split(double v_base, double steering) {
    const double t = std::tanh(steering);
    return {v_base * (1.0 - t), v_base * (1.0 + t)};
}

sim::WheelCommand turn_in_place(double steering, double spin_speed) {
    const double t = std::tanh(steering);
    return {-spin_speed * t, spin_speed * t};
}

bool waypoint_reached(const TrackingErrors& errors, double speed) {
    return errors.distance < kArrivalDistance && std::abs(errors.heading) < kArrivalHeading &&
           std::abs(speed) < kArrivalSpeed;
}

std::string_view to_string(MotionStatus s) {
    switch (s) {
        case MotionStatus::success: return "success";
        case MotionStatus::collision: return "collision";
        case MotionStatus::timeout: return "timeout";
    }
    return "unknown";
}

MotionOutcome motion_control(const planner::WaypointPath& path, sim::Simulator& sim, const ControllerConfig& config) {
    if (path.empty()) throw InputError("motion_control needs a non-empty waypoint path");
    if (!(config.v0 > 0.0)) throw InputError("base speed v0 must be positive");

    const std::size_t first_sample = sim.log().samples().size() - 1;
    const std::size_t last = path.size() - 1;
    ControllerState state;
    state.v0 = config.v0;
    bool tail_first = false;
    MotionOutcome out;

    auto finish = [&](MotionStatus status) {
        out.status = status;
        const auto& samples = sim.log().samples();
        for (std::size_t i = first_sample + 1; i < samples.size(); ++i)
            out.traveled += std::hypot(samples[i].x - samples[i - 1].x, samples[i].y - samples[i - 1].y);
        out.final_error = distance(sim.state().pose.position, path.points[last]);
        return out;
    };

    // In the reverse band the robot drives tail-first, so arrival judges the rear-facing
    // heading error; otherwise a waypoint behind the robot could never be reached.
    auto reached = [&](const TrackingErrors& errors) {
        TrackingErrors judged = errors;
        if (std::abs(errors.heading) > kReverseAngle) judged.heading = std::numbers::pi - std::abs(errors.heading);
        return waypoint_reached(judged, sim.state().linear_speed());
    };

    // Arrival is latched: the index only moves forward, once per reached waypoint.
    auto advance = [&](TrackingErrors& errors) {
        while (reached(errors)) {
            ++out.waypoints_reached;
            if (state.waypoint_index == last) return true;
            ++state.waypoint_index;
            state.reset_pid();
            errors = compute_errors(sim.state().pose, path.points[state.waypoint_index]);
        }
        return false;
    };

    for (std::size_t k = 0; k < config.max_steps; ++k) {
        TrackingErrors errors = compute_errors(sim.state().pose, path.points[state.waypoint_index]);
        if (advance(errors)) return finish(MotionStatus::success);

        // Reverse mode drives tail-first: the PID tracks the rear-facing error so that the
        // mirrored steering turns the tail onto the target. History restarts on mode flips.
        const bool rear = std::abs(errors.heading) > kReverseAngle;
        if (rear != tail_first) {
            state.reset_pid();
            tail_first = rear;
        }
        const double tracked = rear ? wrap_angle(errors.heading - std::numbers::pi) : errors.heading;
        const double steering = pid_step(tracked, state, config.gains, sim.params().dt);
        const VelocityCommand cmd = modulate_velocity(errors, steering, state.v0);
        // The tanh split turns at a rate proportional to v_base, which vanishes as braking
        // engages. A spin term scaled by the braking deficit keeps steering authority; it adds
        // equal and opposite wheel speeds, so V_L + V_R = 2 v_base still holds.
        const double braking = std::max(0.0, 1.0 - std::abs(tracked) / kBrakingAngle);
        sim::WheelCommand wheels = wheel_split(cmd.v_base, cmd.steering);
        const sim::WheelCommand spin = turn_in_place(steering, state.v0 * (1.0 - braking));
        wheels.left += spin.left;
        wheels.right += spin.right;

        const sim::CollisionReport hit = sim.apply(wheels);
        ++out.steps;
        if (hit.collided) {
            out.collided_with = hit.with;
            return finish(MotionStatus::collision);
        }
    }
    TrackingErrors errors = compute_errors(sim.state().pose, path.points[state.waypoint_index]);
    if (advance(errors)) return finish(MotionStatus::success);
    return finish(MotionStatus::timeout);
}

}  // namespace llmnav::control
