#include <llmnav/controller.hpp>
#include <llmnav/error.hpp>
#include <llmnav/planner.hpp>
#include <llmnav/simulator.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace llmnav;
using namespace llmnav::control;

namespace {

constexpr double kPi = std::numbers::pi;

world::Scenario corridor(bool blocked) {
    world::Scenario s;
    s.name = "corridor";
    s.bounds = {0, 0, 5, 2};
    s.spawn = {{0.5, 1.0}, 0.0};
    if (blocked) s.objects.push_back({"crate", {2.0, 0.0, 2.3, 2.0}});
    return s;
}

planner::WaypointPath straight(double x0, double x1, double y, double spacing) {
    planner::WaypointPath p;
    for (double x = x0; x <= x1 + 1e-9; x += spacing) {
        p.points.push_back({x, y});
        p.cells.push_back({0, 0});
        p.source_indices.push_back(p.points.size() - 1);
    }
    return p;
}

}  // namespace

TEST(Errors, AlignedAndQuarterTurn) {
    const auto a = compute_errors({{0, 0}, 0.0}, {1, 0});
    EXPECT_DOUBLE_EQ(a.distance, 1.0);
    EXPECT_DOUBLE_EQ(a.heading, 0.0);
    const auto b = compute_errors({{0, 0}, 0.0}, {0, 1});
    EXPECT_DOUBLE_EQ(b.distance, 1.0);
    EXPECT_DOUBLE_EQ(b.heading, kPi / 2);
    EXPECT_EQ(compute_errors({{2, 3}, 1.0}, {2, 3}).heading, 0.0);
    EXPECT_THROW(compute_errors({{0, 0}, 0.0}, {NAN, 0}), InputError);
}

TEST(Errors, WrapAgreesWithOracle) {
    const auto e = compute_errors({{0, 0}, 3.0}, {-1, -0.001});
    EXPECT_NEAR(e.heading, oracle::wrap(std::atan2(-0.001, -1.0) - 3.0), 1e-12);
    for (int i = -40; i <= 40; ++i) {
        const double theta = i * 0.157;
        for (int k = 0; k < 36; ++k) {
            const double a = k * 2 * kPi / 36 + 0.01;
            const Vec2 target{std::cos(a) * 2.0, std::sin(a) * 2.0};
            const auto err = compute_errors({{0, 0}, theta}, target);
            EXPECT_GT(err.heading, -kPi);
            EXPECT_LE(err.heading, kPi);
            EXPECT_NEAR(err.heading, oracle::wrap(std::atan2(target.y, target.x) - theta), 1e-9);
        }
    }
}

TEST(Pid, NullError) {
    ControllerState s;
    EXPECT_EQ(pid_step(0.0, s, {}, 0.05), 0.0);
}

TEST(Pid, HandEvaluatedFirstStep) {
    ControllerState s;
    // 3.2*0.1 + 0.1*(0.1*1) + 0.3*(0.1-0)/1
    EXPECT_NEAR(pid_step(0.1, s, {3.2, 0.1, 0.3}, 1.0), 0.36, 1e-12);
    EXPECT_NEAR(s.integral, 0.1, 1e-15);
    EXPECT_EQ(s.prev_error, 0.1);
}

TEST(Pid, SaturatesAtPiOverFive) {
    ControllerState s;
    EXPECT_NEAR(pid_step(1.0, s, {}, 0.05), kPi / 5, 1e-15);
    ControllerState t;
    EXPECT_NEAR(pid_step(-1.0, t, {}, 0.05), -kPi / 5, 1e-15);
}

TEST(Pid, IntegralIsClamped) {
    ControllerState s;
    for (int i = 0; i < 1000; ++i) pid_step(1.0, s, {}, 0.05);
    EXPECT_DOUBLE_EQ(s.integral, 1.0);
    s.reset_pid();
    EXPECT_EQ(s.integral, 0.0);
    EXPECT_THROW(pid_step(0.1, s, {}, 0.0), InputError);
}

TEST(Pid, LinearBelowSaturation) {
    for (double e : {0.01, 0.02, 0.03}) {
        ControllerState a, b;
        const PidGains g{3.2, 0.1, 0.3, 100.0, 100.0};
        EXPECT_NEAR(pid_step(2 * e, a, g, 0.05), 2 * pid_step(e, b, g, 0.05), 1e-12);
    }
}

TEST(Velocity, DirectEvaluation) {
    const auto c = modulate_velocity({2.4, 0.0}, 0.1, 10.0);
    EXPECT_NEAR(c.v_base, 12.0, 1e-12);
    EXPECT_FALSE(c.reverse);
    EXPECT_EQ(c.steering, 0.1);
    // distance decay below 1.2 m
    EXPECT_NEAR(modulate_velocity({0.6, 0.0}, 0.0, 1.0).v_base, 0.6, 1e-12);
}

TEST(Velocity, BrakingNullPoint) {
    for (double d : {0.1, 1.0, 5.0}) {
        EXPECT_EQ(modulate_velocity({d, kPi / 3}, 0.0, 1.0).v_base, 0.0);
        EXPECT_EQ(modulate_velocity({d, -kPi / 3}, 0.0, 1.0).v_base, 0.0);
        // dead band between pi/3 and pi/2 floors at zero
        EXPECT_EQ(modulate_velocity({d, 1.3}, 0.0, 1.0).v_base, 0.0);
    }
}

TEST(Velocity, ReverseRule) {
    const auto r = apply_reverse(5.0, 0.3);
    EXPECT_DOUBLE_EQ(r.v_base, -3.0);
    EXPECT_DOUBLE_EQ(r.steering, -0.3);
    EXPECT_TRUE(r.reverse);
    const auto m = modulate_velocity({2.0, 2.0}, 0.3, 1.0);
    EXPECT_TRUE(m.reverse);
    EXPECT_EQ(m.steering, -0.3);
    EXPECT_LE(m.v_base, 0.0);
    // rear error pi - 2.9 is well inside the braking window, so the robot backs up
    EXPECT_LT(modulate_velocity({2.0, 2.9}, 0.0, 1.0).v_base, 0.0);
}

TEST(Velocity, ReverseTriggerSweep) {
    for (int i = -5000; i <= 5000; ++i) {
        const double e = oracle::wrap(i * kPi / 5000.0);
        const auto c = modulate_velocity({1.0, e}, 0.2, 0.8);
        EXPECT_EQ(c.reverse, std::abs(e) > kPi / 2) << e;
    }
}

TEST(Velocity, BrakingIsMonotone) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) {
        const double v = modulate_velocity({0.9, i * (kPi / 3) / 1000.0}, 0.0, 0.8).v_base;
        EXPECT_LE(v, prev);
        prev = v;
    }
    EXPECT_THROW(modulate_velocity({1.0, 0.0}, 0.0, 0.0), InputError);
}

TEST(WheelSplit, Values) {
    const auto z = wheel_split(0.7, 0.0);
    EXPECT_EQ(z.left, 0.7);
    EXPECT_EQ(z.right, 0.7);
    // tanh from its exponential form: (e^2x - 1) / (e^2x + 1)
    const double e2 = std::exp(2 * 0.6283), th = (e2 - 1) / (e2 + 1);
    const auto w = wheel_split(1.0, 0.6283);
    EXPECT_NEAR(w.left, 1.0 - th, 1e-15);
    EXPECT_NEAR(w.right, 1.0 + th, 1e-15);
    EXPECT_NEAR(w.left, 0.44312, 5e-6);
    EXPECT_NEAR(w.right, 1.55688, 5e-6);
    const auto m = wheel_split(1.0, -0.6283);
    EXPECT_EQ(m.left, w.right);
    EXPECT_EQ(m.right, w.left);
}

TEST(WheelSplit, SumIdentity) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> v(-2.0, 2.0), d(-kPi / 5, kPi / 5);
    for (int i = 0; i < 10000; ++i) {
        const double vb = v(rng);
        const auto w = wheel_split(vb, d(rng));
        EXPECT_NEAR(w.left + w.right, 2 * vb, 1e-12);
    }
}

TEST(TurnInPlace, ZeroNetSpeed) {
    const auto w = turn_in_place(0.4, 0.8);
    EXPECT_EQ(w.left, -w.right);
    EXPECT_GT(w.right, 0.0);
}

TEST(Arrival, StrictInequalities) {
    EXPECT_TRUE(waypoint_reached({0.3, 0.5}, 0.5));
    EXPECT_FALSE(waypoint_reached({0.45, 0.0}, 0.0));
    EXPECT_FALSE(waypoint_reached({0.39, kPi / 3}, 0.0));
    EXPECT_FALSE(waypoint_reached({0.1, 0.0}, 1.0));
    EXPECT_TRUE(waypoint_reached({0.1, 0.0}, -0.99));
}

TEST(MotionControl, SingleWaypointAtRobotCell) {
    sim::Simulator s(corridor(false));
    planner::WaypointPath p;
    p.points = {{0.525, 1.025}};
    p.cells = {{20, 10}};
    p.source_indices = {0};
    const auto out = motion_control(p, s);
    EXPECT_EQ(out.status, MotionStatus::success);
    EXPECT_EQ(out.steps, 0u);
    EXPECT_NEAR(out.traveled, 0.0, 1e-12);
}

TEST(MotionControl, StraightCorridor) {
    sim::Simulator s(corridor(false));
    const auto p = straight(0.5, 3.5, 1.0, 0.25);
    const auto out = motion_control(p, s);
    EXPECT_EQ(out.status, MotionStatus::success);
    EXPECT_EQ(out.waypoints_reached, p.size());
    EXPECT_NEAR(out.traveled, 3.0, 0.15 * 3.0);
    EXPECT_LT(out.final_error, 0.4);
    EXPECT_NEAR(out.traveled, s.log().traveled_length(), 1e-12);
}

TEST(MotionControl, WaypointBehindRobotIsReached) {
    // Spawned facing away from the whole path.
    sim::Simulator s(corridor(false), {}, {{3.0, 1.0}, 0.0});
    const auto p = straight(0.75, 3.0, 1.0, 0.25);
    planner::WaypointPath rev;
    rev.points.assign(p.points.rbegin(), p.points.rend());
    rev.cells = p.cells;
    rev.source_indices = p.source_indices;
    const auto out = motion_control(rev, s);
    EXPECT_EQ(out.status, MotionStatus::success);
    EXPECT_LT(distance(s.state().pose.position, {0.75, 1.0}), 0.5);
}

TEST(MotionControl, MapSceneMismatchCollides) {
    sim::Simulator s(corridor(true));
    const auto out = motion_control(straight(0.5, 4.0, 1.0, 0.25), s);
    EXPECT_EQ(out.status, MotionStatus::collision);
    EXPECT_EQ(out.collided_with, "crate");
}

TEST(MotionControl, StepBudget) {
    sim::Simulator s(corridor(false));
    ControllerConfig cfg;
    cfg.max_steps = 5;
    const auto out = motion_control(straight(0.5, 4.0, 1.0, 0.25), s, cfg);
    EXPECT_EQ(out.status, MotionStatus::timeout);
    EXPECT_EQ(out.steps, 5u);
    EXPECT_THROW(motion_control({}, s), InputError);
}
