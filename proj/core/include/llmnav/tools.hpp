#pragma once

#include <llmnav/controller.hpp>
#include <llmnav/planner.hpp>
#include <llmnav/simulator.hpp>
#include <llmnav/toolproto.hpp>
#include <llmnav/worldmodel.hpp>

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>

namespace llmnav::tools {

/// Values the validator treats as immutable.
struct PhysicalConstraints {
    double resolution = world::kDefaultResolution;
    /// m/s. Must not exceed sim::kAbsoluteSpeedCap.
    double max_velocity = 1.0;
    int robot_id = world::kDefaultRobotId;
};

struct NavSettings {
    world::GridOptions grid;
    control::ControllerConfig controller;
    sim::RobotParams robot;
    PhysicalConstraints constraints;
};

/// Throws ConfigError when settings disagree with each other (e.g. grid resolution vs constraint).
void validate(const NavSettings& settings);

/// Everything a tool call can touch during one episode: the scene, the plant and the
/// products of earlier calls (map, plan, last motion outcome).
class NavWorld {
public:
    NavWorld(world::Scenario scenario, NavSettings settings);
    NavWorld(world::Scenario scenario, NavSettings settings, Pose2 start);

    const world::Scenario& scenario() const noexcept { return scenario_; }
    const NavSettings& settings() const noexcept { return settings_; }
    sim::Simulator& simulator() noexcept { return sim_; }
    const sim::Simulator& simulator() const noexcept { return sim_; }

    const std::optional<world::GridMap>& map() const noexcept { return map_; }
    const std::optional<planner::PlanResult>& plan() const noexcept { return plan_; }
    const std::optional<control::MotionOutcome>& last_motion() const noexcept { return last_motion_; }

    void set_map(world::GridMap map);
    void set_plan(planner::PlanResult plan);
    void set_motion(control::MotionOutcome outcome) { last_motion_ = std::move(outcome); }

private:
    world::Scenario scenario_;
    NavSettings settings_;
    sim::Simulator sim_;
    std::optional<world::GridMap> map_;
    std::optional<planner::PlanResult> plan_;
    std::optional<control::MotionOutcome> last_motion_;
};

/// Variables that "$name" references in a tools manifest resolve against.
std::map<std::string, double> manifest_variables(const NavSettings& settings);

/// Builds a registry from a declarative manifest. Tools without a built-in handler get
/// one that reports "no executor bound".
ToolRegistry load_manifest(const nlohmann::json& manifest, const std::map<std::string, double>& variables);

/// The five navigation tools backed by the built-in manifest.
ToolRegistry make_default_registry(const NavSettings& settings = {});

/// Built-in manifest text (data/protocol/tools_manifest.json).
const std::string& default_manifest_text();

/// The built-in handler for a tool name, or nullptr.
const ToolHandler* builtin_handler(std::string_view name);

// Individual handlers, usable directly (the baseline pipeline calls them).
ToolResult create_grid_map_tool(const BoundInvocation& call, NavWorld& world);
ToolResult plan_global_path_tool(const BoundInvocation& call, NavWorld& world);
ToolResult motion_control_tool(const BoundInvocation& call, NavWorld& world);
ToolResult get_husky_position_tool(const BoundInvocation& call, NavWorld& world);
ToolResult get_living_room_info_tool(const BoundInvocation& call, NavWorld& world);

}  // namespace llmnav::tools
