#include <llmnav/error.hpp>
#include <llmnav/prompt.hpp>
#include <llmnav/tools.hpp>

#include <gtest/gtest.h>

using namespace llmnav;
using namespace llmnav::tools;

namespace {

world::Scenario living_room() {
    return world::load_scenario_file(std::string(LLMNAV_DATA_DIR) + "/scenarios/living_room.json");
}

NavSettings suite_settings() {
    NavSettings s;
    s.grid.inflation_radius = 6;
    return s;
}

ToolResult call(const ToolRegistry& reg, NavWorld& w, ToolCall c) {
    const auto v = validate_call(c, reg);
    return v.ok() ? execute(*v.invocation, reg, w) : v.error;
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST(Tools, PositionAtSpawn) {
    const auto sc = living_room();
    NavWorld w(sc, suite_settings());
    const auto reg = make_default_registry(w.settings());
    const auto r = call(reg, w, {"get_husky_position", {}, ""});
    ASSERT_TRUE(r.ok()) << r.feedback_text;
    EXPECT_EQ(r.payload["position"][0].get<double>(), sc.spawn.position.x);
    EXPECT_EQ(r.payload["position"][1].get<double>(), sc.spawn.position.y);
    EXPECT_EQ(r.payload["orientation"].size(), 4u);
    EXPECT_TRUE(r.feedback_text.starts_with("OK(get_husky_position): "));
}

TEST(Tools, RoomInfoListsEveryObject) {
    const auto sc = living_room();
    NavWorld w(sc, suite_settings());
    const auto r = call(make_default_registry(), w, {"get_living_room_info", {}, ""});
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.payload["objects"].size(), sc.objects.size());
    for (const auto& o : sc.objects) EXPECT_NE(r.feedback_text.find(o.label), std::string::npos);
}

TEST(Tools, PlanBeforeMapIsAnError) {
    NavWorld w(living_room(), suite_settings());
    const auto reg = make_default_registry(w.settings());
    const auto r = call(reg, w, {"plan_global_path", {{"goal_x", 6.4}, {"goal_y", 1.6}}, ""});
    EXPECT_FALSE(r.ok());
    EXPECT_NE(r.feedback_text.find("create_grid_map"), std::string::npos);
    EXPECT_FALSE(call(reg, w, {"motion_control", {}, ""}).ok());
}

TEST(Tools, OccupiedGoalIsAnError) {
    const auto sc = living_room();
    NavWorld w(sc, suite_settings());
    const auto reg = make_default_registry(w.settings());
    ASSERT_TRUE(call(reg, w, {"create_grid_map", {}, ""}).ok());
    const auto sofa = std::find_if(sc.objects.begin(), sc.objects.end(), [](auto& o) { return o.label == "sofa"; });
    ASSERT_NE(sofa, sc.objects.end());
    const Rect& f = sofa->footprint;
    const Vec2 c{(f.x_min + f.x_max) / 2, (f.y_min + f.y_max) / 2};
    const auto r = call(reg, w, {"plan_global_path", {{"goal_x", c.x}, {"goal_y", c.y}}, ""});
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.feedback_text.find("occupied"), std::string::npos) << r.feedback_text;
    EXPECT_FALSE(r.payload["reachable"].get<bool>());
    const auto out = call(reg, w, {"plan_global_path", {{"goal_x", 50.0}, {"goal_y", 1.0}}, ""});
    EXPECT_NE(out.feedback_text.find("outside the room"), std::string::npos);
}

TEST(Tools, FullSequenceArrives) {
    NavWorld w(living_room(), suite_settings());
    const auto reg = make_default_registry(w.settings());
    const auto a = call(reg, w, {"create_grid_map", {{"resolution", 0.05}}, ""});
    const auto b = call(reg, w, {"plan_global_path", {{"goal_x", 6.4}, {"goal_y", 1.6}}, ""});
    const auto c = call(reg, w, {"motion_control", {{"velocity", 0.8}}, ""});
    ASSERT_TRUE(a.ok()) << a.feedback_text;
    ASSERT_TRUE(b.ok()) << b.feedback_text;
    ASSERT_TRUE(c.ok()) << c.feedback_text;
    EXPECT_EQ(c.payload["status"], "success");
    EXPECT_LT(distance(w.simulator().state().pose.position, {6.4, 1.6}), 0.5);
    // a new map invalidates the old plan
    ASSERT_TRUE(call(reg, w, {"create_grid_map", {}, ""}).ok());
    EXPECT_FALSE(w.plan().has_value());
}

TEST(Tools, UnboundManifestToolReportsMissingExecutor) {
    nlohmann::json manifest = nlohmann::json::parse(default_manifest_text());
    manifest["tools"].push_back({{"name", "open_door"}, {"description", "d"}, {"params", nlohmann::json::array()}});
    const auto reg = load_manifest(manifest, manifest_variables({}));
    EXPECT_EQ(reg.size(), 6u);
    NavWorld w(living_room(), {});
    const auto r = call(reg, w, {"open_door", {}, ""});
    EXPECT_FALSE(r.ok());
    EXPECT_NE(r.feedback_text.find("no executor"), std::string::npos);
}

TEST(Settings, Validation) {
    NavSettings s;
    EXPECT_NO_THROW(validate(s));
    s.constraints.resolution = 0.1;
    EXPECT_THROW(validate(s), ConfigError);
    s = {};
    s.controller.v0 = 2.0;
    EXPECT_THROW(validate(s), ConfigError);
}

// --- prompt ---------------------------------------------------------------------

TEST(Prompt, EachToolAppearsOnce) {
    const auto reg = make_default_registry();
    const std::string p = prompt::render_system_prompt(reg, {}, "living_room");
    for (const auto& n : reg.names()) EXPECT_EQ(occurrences(p, "## Tool: " + n + "\n"), 1u) << n;
    EXPECT_EQ(p, prompt::render_system_prompt(reg, {}, "living_room"));
    EXPECT_EQ(p.find("{{"), std::string::npos);
}

TEST(Prompt, DefaultsAreRendered) {
    const std::string p = prompt::render_system_prompt(make_default_registry(), {}, "living_room");
    EXPECT_NE(p.find("resolution (number, optional, default 0.05"), std::string::npos);
    EXPECT_NE(p.find("robot_id (integer, optional, default 1"), std::string::npos);
}

TEST(Prompt, SixthToolAddsOneSection) {
    const auto five = make_default_registry();
    auto six = make_default_registry();
    six.add({"open_door", "Open a door.", {}, "<open_door/>"},
            [](const BoundInvocation& c, NavWorld&) { return ToolResult::success(c.tool, {}, "OK"); });
    const auto a = prompt::render_sections(five, {}, "living_room");
    const auto b = prompt::render_sections(six, {}, "living_room");
    ASSERT_EQ(a.size(), 8u);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].first != "toolset") {
            EXPECT_EQ(a[i], b[i]);
            continue;
        }
        const std::string old_tools = prompt::render_toolset(five);
        const std::string new_tools = prompt::render_toolset(six);
        EXPECT_TRUE(new_tools.starts_with(old_tools));
        EXPECT_EQ(occurrences(new_tools, "## Tool: "), 6u);
        EXPECT_EQ(new_tools.substr(old_tools.size()), "## Tool: open_door\nOpen a door.\nParameters: none\nExample: <open_door/>\n\n");
    }
}

TEST(Prompt, EmptyRegistryAndBadTemplate) {
    EXPECT_THROW(prompt::render_system_prompt(ToolRegistry{}, {}, "x"), ConfigError);
    EXPECT_THROW(prompt::PromptTemplate::parse("=== section: role ===\nhi\n"), ConfigError);
}
