#include <llmnav/error.hpp>
#include <llmnav/toolproto.hpp>
#include <llmnav/tools.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace llmnav::tools;

namespace {

bool contains(const std::string& hay, std::string_view needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Parse, PlanGlobalPathExample) {
    const auto r = parse_tool_call("<plan_global_path><goal_x>3.0</goal_x><goal_y>1.5</goal_y></plan_global_path>");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.call->tool, "plan_global_path");
    EXPECT_EQ(r.call->args.size(), 2u);
    EXPECT_EQ(std::get<double>(r.call->args.at("goal_x")), 3.0);
    EXPECT_EQ(std::get<double>(r.call->args.at("goal_y")), 1.5);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Parse, ProseOnly) {
    const auto r = parse_tool_call("I think the robot should go to the desk next.");
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.error->kind, ParseErrorKind::no_tool_found);
    EXPECT_EQ(r.error->message, "no tool invocation found");
    EXPECT_FALSE(parse_tool_call("").ok());
}

TEST(Parse, SecondElementIsIgnoredWithWarning) {
    const auto r = parse_tool_call("<get_husky_position/> then <get_living_room_info/>");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.call->tool, "get_husky_position");
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_TRUE(contains(r.warnings[0], "get_living_room_info"));
}

TEST(Parse, ReasoningAndSurroundingTextAreSkipped) {
    const auto r = parse_tool_call(
        "Let me think.\n<thinking>maybe <motion_control></motion_control> later</thinking>\n"
        "<create_grid_map>\n  <resolution> 0.05 </resolution>\n</create_grid_map>\nDone.");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.call->tool, "create_grid_map");
    EXPECT_EQ(std::get<double>(r.call->args.at("resolution")), 0.05);
    EXPECT_TRUE(contains(r.call->raw, "Let me think."));
}

TEST(Parse, ValueTyping) {
    const auto r = parse_tool_call("<t><a>-1e-3</a><b>kitchen</b><c>+2</c><d>1.</d><e>.5</e><f>1e</f></t>");
    ASSERT_TRUE(r.ok());
    const auto& a = r.call->args;
    EXPECT_EQ(std::get<double>(a.at("a")), -1e-3);
    EXPECT_EQ(std::get<std::string>(a.at("b")), "kitchen");
    EXPECT_EQ(std::get<double>(a.at("c")), 2.0);
    EXPECT_EQ(std::get<double>(a.at("d")), 1.0);
    EXPECT_EQ(std::get<double>(a.at("e")), 0.5);
    EXPECT_EQ(std::get<std::string>(a.at("f")), "1e");
}

TEST(Parse, EntitiesAreDecoded) {
    const auto r = parse_tool_call("<t><s>a &lt;b&gt; &amp; c</s></t>");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(std::get<std::string>(r.call->args.at("s")), "a <b> & c");
}

TEST(Parse, DuplicateParameter) {
    const auto r = parse_tool_call("<plan_global_path><goal_x>1</goal_x><goal_x>2</goal_x></plan_global_path>");
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.error->kind, ParseErrorKind::duplicate_parameter);
    const auto fb = parse_failure_result(*r.error);
    EXPECT_FALSE(fb.ok());
    EXPECT_TRUE(fb.feedback_text.starts_with("TOOL_ERROR("));
    EXPECT_TRUE(contains(fb.feedback_text, "Hint: "));
}

TEST(Parse, MalformedNesting) {
    for (const char* text : {"<motion_control><velocity>0.8</motion_control>",
                             "<motion_control><velocity>0.8</velocity>",
                             "<motion_control>fast</motion_control>",
                             "<a><b><c>1</c></b></a>"}) {
        const auto r = parse_tool_call(text);
        ASSERT_FALSE(r.ok()) << text;
        EXPECT_EQ(r.error->kind, ParseErrorKind::malformed_nesting) << text;
    }
}

TEST(Parse, SelfClosingParameter) {
    const auto r = parse_tool_call("<task_complete><summary/></task_complete>");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(std::get<std::string>(r.call->args.at("summary")), "");
}

TEST(Numbers, NumericShape) {
    for (const char* yes : {"0", "-1", "+3.5", "1e10", "2.5E-3", ".5", "5."}) EXPECT_TRUE(is_numeric_shaped(yes)) << yes;
    for (const char* no : {"", ".", "-", "1e", "0x10", "inf", "nan", "1 2", "1.2.3"})
        EXPECT_FALSE(is_numeric_shaped(no)) << no;
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(3.0), "3");
}

TEST(RoundTrip, GeneratedCalls) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> len(1, 12), nargs(0, 5), pick(0, 3);
    std::uniform_int_distribution<int> ch(0x20, 0x7e);
    const std::string ident = "abcdefghijklmnopqrstuvwxyz_";
    std::uniform_int_distribution<std::size_t> id_char(0, ident.size() - 1);
    auto name = [&] {
        std::string s;
        for (int i = 0, n = len(rng); i < n; ++i) s += ident[id_char(rng)];
        return s == "thinking" || s == "reasoning" ? s + "x" : s;
    };
    for (int trial = 0; trial < 2000; ++trial) {
        ToolCall c;
        c.tool = name();
        for (int k = 0, n = nargs(rng); k < n; ++k) {
            ArgValue v;
            switch (pick(rng)) {
                case 0: v = std::uniform_real_distribution<double>(-1e6, 1e6)(rng); break;
                case 1: v = static_cast<double>(std::uniform_int_distribution<int>(-50, 50)(rng)); break;
                default: {
                    std::string s;
                    for (int i = 0, m = len(rng); i < m; ++i) s += static_cast<char>(ch(rng));
                    const auto b = s.find_first_not_of(' '), e = s.find_last_not_of(' ');
                    s = b == std::string::npos ? "x" : s.substr(b, e - b + 1);
                    if (is_numeric_shaped(s)) s += "!";
                    v = s;
                }
            }
            if (auto n = name(); n != c.tool) c.args[n] = v;
        }
        const std::string wire = serialize(c);
        const auto r = parse_tool_call(wire);
        ASSERT_TRUE(r.ok()) << wire;
        EXPECT_EQ(*r.call, c) << wire;
        EXPECT_EQ(serialize(*r.call), wire);
    }
}

TEST(Fuzz, RandomBytesNeverEscape) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> byte(0, 255), len(0, 64);
    const std::string alphabet = "<>/abc_ \n&;0.1";
    std::uniform_int_distribution<std::size_t> sym(0, alphabet.size() - 1);
    for (int i = 0; i < 5000; ++i) {
        std::string s;
        const bool structured = i % 2 == 0;
        for (int k = 0, n = len(rng); k < n; ++k)
            s += structured ? alphabet[sym(rng)] : static_cast<char>(byte(rng));
        const auto r = parse_tool_call(s);
        EXPECT_NE(r.call.has_value(), r.error.has_value());
    }
}

// --- registry and validation ---------------------------------------------------

TEST(Registry, DefaultHasFiveToolsInOrder) {
    const auto reg = make_default_registry();
    EXPECT_EQ(reg.names(), (std::vector<std::string>{"create_grid_map", "plan_global_path", "motion_control",
                                                     "get_husky_position", "get_living_room_info"}));
}

TEST(Registry, DuplicateNameRejected) {
    const ToolHandler noop = [](const BoundInvocation& c, NavWorld&) { return ToolResult::success(c.tool, {}, "OK"); };
    ToolRegistry reg;
    reg.add({"a", "", {}, "<a/>"}, noop);
    EXPECT_THROW(reg.add({"a", "", {}, "<a/>"}, noop), llmnav::ConfigError);
    EXPECT_THROW(reg.add({"c", "", {}, "<c/>"}, nullptr), llmnav::ConfigError);
    ParamSpec p{"x", ParamType::number, true, ArgValue{1.0}, {}, "", ""};
    EXPECT_THROW(reg.add({"b", "", {p}, "<b/>"}, noop), llmnav::ConfigError);
}

TEST(Validate, UnknownToolListsRegistry) {
    const auto reg = make_default_registry();
    const auto v = validate_call({"teleport_robot", {}, ""}, reg);
    ASSERT_FALSE(v.ok());
    const std::string& fb = v.error.feedback_text;
    EXPECT_TRUE(fb.starts_with("TOOL_ERROR(teleport_robot): unknown tool"));
    for (const auto& n : reg.names()) EXPECT_TRUE(contains(fb, n)) << n;
}

TEST(Validate, DefaultsAreFilled) {
    const auto reg = make_default_registry();
    const auto v = validate_call({"create_grid_map", {}, ""}, reg);
    ASSERT_TRUE(v.ok());
    EXPECT_EQ(v.invocation->number("resolution"), 0.05);
    const auto m = validate_call({"motion_control", {}, ""}, reg);
    ASSERT_TRUE(m.ok());
    EXPECT_EQ(m.invocation->integer("robot_id"), 1);
}

TEST(Validate, VelocityAboveMaximum) {
    const auto reg = make_default_registry();
    const auto v = validate_call({"motion_control", {{"velocity", 99.0}}, ""}, reg);
    ASSERT_FALSE(v.ok());
    EXPECT_TRUE(contains(v.error.feedback_text, "maximum velocity")) << v.error.feedback_text;
    EXPECT_FALSE(validate_call({"motion_control", {{"velocity", 0.0}}, ""}, reg).ok());
    EXPECT_TRUE(validate_call({"motion_control", {{"velocity", 1.0}}, ""}, reg).ok());
}

TEST(Validate, TypesAndConstraints) {
    const auto reg = make_default_registry();
    EXPECT_FALSE(validate_call({"plan_global_path", {{"goal_x", 1.0}}, ""}, reg).ok());
    EXPECT_FALSE(validate_call({"plan_global_path", {{"goal_x", 1.0}, {"goal_y", std::string("far")}}, ""}, reg).ok());
    EXPECT_FALSE(validate_call({"create_grid_map", {{"resolution", 0.1}}, ""}, reg).ok());
    EXPECT_FALSE(validate_call({"create_grid_map", {{"inflation_radius", 2.5}}, ""}, reg).ok());
    EXPECT_FALSE(validate_call({"get_husky_position", {{"robot_id", 7.0}}, ""}, reg).ok());
    const auto extra = validate_call({"get_living_room_info", {{"verbose", 1.0}}, ""}, reg);
    ASSERT_FALSE(extra.ok());
    EXPECT_TRUE(contains(extra.error.feedback_text, "unknown parameter 'verbose'"));
}

TEST(Results, ErrorFormat) {
    EXPECT_EQ(format_tool_error("x", "bad thing", "do better"), "TOOL_ERROR(x): bad thing. Hint: do better");
    const auto r = ToolResult::failure("x", "bad thing", "do better");
    EXPECT_FALSE(r.ok());
    EXPECT_EQ(r.feedback_text, "TOOL_ERROR(x): bad thing. Hint: do better");
}
