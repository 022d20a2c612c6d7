#include <llmnav/tools.hpp>

#include <llmnav/error.hpp>

#include <cmath>
#include <cstdio>

namespace llmnav::tools {

// Defined in the generated embedded_assets.cpp.
extern const char* const kEmbeddedToolsManifest;

namespace {

std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string point_text(Vec2 p) { return "(" + fixed(p.x) + ", " + fixed(p.y) + ")"; }

nlohmann::json rect_json(const Rect& r) {
    return {{"x_min", r.x_min}, {"y_min", r.y_min}, {"x_max", r.x_max}, {"y_max", r.y_max}};
}

std::string rect_text(const Rect& r) {
    return "[" + fixed(r.x_min, 2) + ", " + fixed(r.y_min, 2) + "] - [" + fixed(r.x_max, 2) + ", " + fixed(r.y_max, 2) +
           "]";
}

}  // namespace

void validate(const NavSettings& s) {
    sim::validate(s.robot);
    if (!(s.constraints.max_velocity > 0.0) || s.constraints.max_velocity > sim::kAbsoluteSpeedCap)
        throw ConfigError("max_velocity must lie in (0, 40] m/s");
    if (std::abs(s.grid.resolution - s.constraints.resolution) > 1e-12)
        throw ConfigError("grid resolution differs from the resolution constraint");
    if (!(s.controller.v0 > 0.0) || s.controller.v0 > s.constraints.max_velocity)
        throw ConfigError("controller v0 must lie in (0, max_velocity]");
    if (s.grid.inflation_radius < 0) throw ConfigError("inflation radius must be non-negative");
    if (s.controller.max_steps == 0) throw ConfigError("controller step budget must be positive");
}

NavWorld::NavWorld(world::Scenario scenario, NavSettings settings)
    : NavWorld(scenario, settings, scenario.spawn) {}

NavWorld::NavWorld(world::Scenario scenario, NavSettings settings, Pose2 start)
    : scenario_(std::move(scenario)), settings_(std::move(settings)), sim_(scenario_, settings_.robot, start) {
    validate(settings_);
}

void NavWorld::set_map(world::GridMap map) {
    map_ = std::move(map);
    plan_.reset();
}

void NavWorld::set_plan(planner::PlanResult plan) { plan_ = std::move(plan); }

// --- handlers ----------------------------------------------------------------

ToolResult create_grid_map_tool(const BoundInvocation& call, NavWorld& world) {
    world::GridOptions options = world.settings().grid;
    if (call.has("resolution")) options.resolution = call.number("resolution");
    if (call.has("inflation_radius")) options.inflation_radius = call.integer("inflation_radius");
    world::GridMap map = world::create_grid_map(world.scenario(), options);
    nlohmann::json payload = world::export_grid_map(map);
    payload["obstacle_count"] = map.obstacle_count();
    std::string feedback = "OK(create_grid_map): " + std::to_string(map.rows()) + "x" + std::to_string(map.cols()) +
                           " grid at " + fixed(map.resolution(), 2) + " m/cell, origin " + point_text(map.origin()) +
                           ", " + std::to_string(map.obstacle_count()) + " obstacle cells after inflating by " +
                           std::to_string(options.inflation_radius) + " cells.";
    world.set_map(std::move(map));
    return ToolResult::success("create_grid_map", std::move(payload), std::move(feedback));
}

ToolResult plan_global_path_tool(const BoundInvocation& call, NavWorld& world) {
    if (!world.map())
        return ToolResult::failure("plan_global_path", "no grid map available", "call create_grid_map first");
    const Vec2 robot = world.simulator().state().pose.position;
    const Vec2 start{call.has("start_x") ? call.number("start_x") : robot.x,
                     call.has("start_y") ? call.number("start_y") : robot.y};
    const Vec2 goal{call.number("goal_x"), call.number("goal_y")};
    const Rect& b = world.scenario().bounds;
    if (!b.contains(goal))
        return ToolResult::failure("plan_global_path", "goal " + point_text(goal) + " lies outside the room",
                                   "pick a goal inside " + rect_text(b));
    if (!b.contains(start))
        return ToolResult::failure("plan_global_path", "start " + point_text(start) + " lies outside the room",
                                   "omit start_x/start_y to plan from the robot position");
    planner::PlanResult plan = planner::plan_global_path(start, goal, *world.map());
    nlohmann::json payload = planner::path_to_json(plan);
    if (!plan.reachable) {
        world.set_plan(std::move(plan));
        std::string reason = payload.value("reason", std::string("unreachable"));
        return ToolResult::failure("plan_global_path", std::move(reason),
                                   "the goal is blocked by furniture or its safety margin; choose a nearby free point "
                                   "or report the goal as unreachable",
                                   std::move(payload));
    }
    std::string feedback = "OK(plan_global_path): " + std::to_string(plan.waypoints.size()) + " waypoints, length " +
                           fixed(plan.length_m) + " m over " + std::to_string(plan.grid_path.cells.size()) +
                           " grid cells. Waypoints:";
    for (const Vec2& p : plan.waypoints.points) feedback += " " + point_text(p);
    world.set_plan(std::move(plan));
    return ToolResult::success("plan_global_path", std::move(payload), std::move(feedback));
}

ToolResult motion_control_tool(const BoundInvocation& call, NavWorld& world) {
    if (!world.plan() || !world.plan()->reachable)
        return ToolResult::failure("motion_control", "no valid planned path", "call plan_global_path successfully first");
    control::ControllerConfig config = world.settings().controller;
    if (call.has("velocity")) config.v0 = call.number("velocity");
    control::MotionOutcome outcome = control::motion_control(world.plan()->waypoints, world.simulator(), config);
    const Pose2 pose = world.simulator().state().pose;
    nlohmann::json payload{{"status", std::string(control::to_string(outcome.status))},
                           {"steps", outcome.steps},
                           {"waypoints_reached", outcome.waypoints_reached},
                           {"traveled_m", outcome.traveled},
                           {"final_error_m", outcome.final_error},
                           {"final_pose", {{"x", pose.position.x}, {"y", pose.position.y}, {"heading", pose.heading}}}};
    const std::string summary = "traveled " + fixed(outcome.traveled) + " m in " + std::to_string(outcome.steps) +
                                " steps, final pose " + point_text(pose.position) + ", " +
                                fixed(outcome.final_error) + " m from the last waypoint";
    world.set_motion(outcome);
    switch (outcome.status) {
        case control::MotionStatus::success:
            return ToolResult::success("motion_control", std::move(payload), "OK(motion_control): arrived; " + summary + ".");
        case control::MotionStatus::collision:
            payload["collided_with"] = outcome.collided_with;
            return ToolResult::failure("motion_control", "robot collided with " + outcome.collided_with + "; " + summary,
                                       "the episode cannot continue after a collision", std::move(payload));
        case control::MotionStatus::timeout:
            break;
    }
    return ToolResult::failure("motion_control", "step budget exhausted; " + summary,
                               "call motion_control again or re-plan from the current position", std::move(payload));
}

ToolResult get_husky_position_tool(const BoundInvocation& call, NavWorld& world) {
    const int id = call.has("robot_id") ? call.integer("robot_id") : world.settings().constraints.robot_id;
    const sim::RobotPose pose = world.simulator().get_robot_pose(id);
    const auto& q = pose.quaternion;
    nlohmann::json payload{{"robot_id", id},
                           {"position", {pose.position.x, pose.position.y}},
                           {"heading", pose.heading},
                           {"orientation", {q[0], q[1], q[2], q[3]}}};
    std::string feedback = "OK(get_husky_position): robot " + std::to_string(id) + " at " + point_text(pose.position) +
                           ", heading " + fixed(pose.heading) + " rad, orientation (" + fixed(q[0]) + ", " +
                           fixed(q[1]) + ", " + fixed(q[2]) + ", " + fixed(q[3]) + ").";
    return ToolResult::success("get_husky_position", std::move(payload), std::move(feedback));
}

ToolResult get_living_room_info_tool(const BoundInvocation&, NavWorld& world) {
    const auto& s = world.scenario();
    nlohmann::json objects = nlohmann::json::array();
    std::string feedback = "OK(get_living_room_info): scene '" + s.name + "', bounds " + rect_text(s.bounds) + ", " +
                           std::to_string(s.objects.size()) + " objects:";
    for (const auto& o : s.objects) {
        objects.push_back({{"label", o.label}, {"rect", rect_json(o.footprint)}});
        feedback += " " + o.label + " " + rect_text(o.footprint) + ";";
    }
    nlohmann::json payload{{"name", s.name}, {"bounds", rect_json(s.bounds)}, {"objects", std::move(objects)}};
    return ToolResult::success("get_living_room_info", std::move(payload), std::move(feedback));
}

const ToolHandler* builtin_handler(std::string_view name) {
    static const std::map<std::string, ToolHandler, std::less<>> table{
        {"create_grid_map", create_grid_map_tool},
        {"plan_global_path", plan_global_path_tool},
        {"motion_control", motion_control_tool},
        {"get_husky_position", get_husky_position_tool},
        {"get_living_room_info", get_living_room_info_tool},
    };
    auto it = table.find(name);
    return it == table.end() ? nullptr : &it->second;
}

// --- manifest ------------------------------------------------------------------

std::map<std::string, double> manifest_variables(const NavSettings& s) {
    return {{"resolution", s.constraints.resolution},
            {"max_velocity", s.constraints.max_velocity},
            {"robot_id", static_cast<double>(s.constraints.robot_id)},
            {"inflation_radius", static_cast<double>(s.grid.inflation_radius)},
            {"v0", s.controller.v0}};
}

namespace {

ArgValue resolve_value(const nlohmann::json& v, const std::map<std::string, double>& vars, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (!s.empty() && s.front() == '$') {
            auto it = vars.find(s.substr(1));
            if (it == vars.end()) throw ConfigError(where + ": unknown manifest variable " + s);
            return it->second;
        }
        return s;
    }
    throw ConfigError(where + ": expected a number, text or $variable");
}

double resolve_number(const nlohmann::json& v, const std::map<std::string, double>& vars, const std::string& where) {
    ArgValue a = resolve_value(v, vars, where);
    if (const double* d = std::get_if<double>(&a)) return *d;
    throw ConfigError(where + ": expected a number");
}

ParamType parse_type(const std::string& t, const std::string& where) {
    if (t == "number") return ParamType::number;
    if (t == "integer") return ParamType::integer;
    if (t == "text") return ParamType::text;
    throw ConfigError(where + ": unknown parameter type '" + t + "'");
}

void attach_constraint(ParamSpec& p, const nlohmann::json& c, const std::map<std::string, double>& vars,
                       const std::string& where) {
    const std::string kind = c.value("kind", std::string());
    const std::string label = c.value("label", std::string());
    if (kind == "equals") {
        const ArgValue expected = resolve_value(c.at("value"), vars, where);
        const std::string shown = format_value(expected);
        p.constraint_text = "exactly " + shown + (label.empty() ? "" : " (" + label + ")");
        p.constraint = [expected, shown, label](const ArgValue& v) -> std::optional<std::string> {
            if (const double* e = std::get_if<double>(&expected)) {
                const double* d = std::get_if<double>(&v);
                if (d && std::abs(*d - *e) <= 1e-9) return std::nullopt;
            } else if (v == expected) {
                return std::nullopt;
            }
            return "value " + format_value(v) + " differs from required " + (label.empty() ? "" : label + " ") + shown;
        };
        return;
    }
    if (kind == "range") {
        struct Bound {
            std::optional<double> value;
            bool exclusive = false;
        };
        Bound lo;
        Bound hi;
        if (c.contains("min")) lo = {resolve_number(c["min"], vars, where), false};
        if (c.contains("min_exclusive")) lo = {resolve_number(c["min_exclusive"], vars, where), true};
        if (c.contains("max")) hi = {resolve_number(c["max"], vars, where), false};
        if (c.contains("max_exclusive")) hi = {resolve_number(c["max_exclusive"], vars, where), true};
        std::string text;
        if (lo.value) text += format_number(*lo.value) + (lo.exclusive ? " < " : " <= ");
        text += "value";
        if (hi.value) text += (hi.exclusive ? " < " : " <= ") + format_number(*hi.value);
        if (!label.empty()) text += " (" + label + ")";
        p.constraint_text = text;
        p.constraint = [lo, hi, label](const ArgValue& v) -> std::optional<std::string> {
            const double* d = std::get_if<double>(&v);
            if (!d) return "value must be numeric";
            if (lo.value && (lo.exclusive ? !(*d > *lo.value) : !(*d >= *lo.value)))
                return "value " + format_number(*d) + " is below the minimum " + format_number(*lo.value);
            if (hi.value && (hi.exclusive ? !(*d < *hi.value) : !(*d <= *hi.value)))
                return "value " + format_number(*d) + " exceeds " + (label.empty() ? "the maximum" : label) + " " +
                       format_number(*hi.value);
            return std::nullopt;
        };
        return;
    }
    throw ConfigError(where + ": unknown constraint kind '" + kind + "'");
}

}  // namespace

ToolRegistry load_manifest(const nlohmann::json& manifest, const std::map<std::string, double>& vars) {
    ToolRegistry registry;
    try {
        for (const auto& t : manifest.at("tools")) {
            ToolSpec spec;
            spec.name = t.at("name").get<std::string>();
            spec.description = t.value("description", std::string());
            spec.example = t.value("example", std::string());
            for (const auto& pj : t.value("params", nlohmann::json::array())) {
                ParamSpec p;
                p.name = pj.at("name").get<std::string>();
                const std::string where = spec.name + "." + p.name;
                p.type = parse_type(pj.value("type", std::string("number")), where);
                p.required = pj.value("required", false);
                p.description = pj.value("description", std::string());
                if (pj.contains("default")) p.default_value = resolve_value(pj["default"], vars, where);
                if (pj.contains("constraint")) attach_constraint(p, pj["constraint"], vars, where);
                spec.params.push_back(std::move(p));
            }
            ToolHandler handler;
            if (const ToolHandler* h = builtin_handler(spec.name)) {
                handler = *h;
            } else {
                handler = [name = spec.name](const BoundInvocation&, NavWorld&) {
                    return ToolResult::failure(name, "no executor bound to this tool", "use one of the navigation tools");
                };
            }
            registry.add(std::move(spec), std::move(handler));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("tools manifest: ") + e.what());
    }
    return registry;
}

const std::string& default_manifest_text() {
    static const std::string text(kEmbeddedToolsManifest);
    return text;
}

ToolRegistry make_default_registry(const NavSettings& settings) {
    static const nlohmann::json manifest = nlohmann::json::parse(default_manifest_text());
    return load_manifest(manifest, manifest_variables(settings));
}

}  // namespace llmnav::tools
