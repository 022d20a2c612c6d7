// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any fails.

#include <llmnav/agent.hpp>
#include <llmnav/controller.hpp>
#include <llmnav/evalharness.hpp>
#include <llmnav/planner.hpp>
#include <llmnav/toolproto.hpp>
#include <llmnav/tools.hpp>
#include <llmnav/worldmodel.hpp>

#include <nlohmann/json.hpp>

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>

using namespace llmnav;
namespace fs = std::filesystem;

namespace {

const fs::path kData = LLMNAV_DATA_DIR;
constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::function<Verdict()>& check) {
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("aborted: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("CRITERION %d %s: %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// --- 1 ---------------------------------------------------------------------------------

Verdict astar_vs_dijkstra() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> coord(0, 19);
    int solvable = 0, mismatches = 0, corner_cuts = 0, bad_paths = 0, false_empty = 0;
    for (int g = 0; g < 500; ++g) {
        const auto map = oracle::random_grid(rng, 20, 20, 0.25);
        Cell s, t;
        do s = {coord(rng), coord(rng)}; while (map[s] != 0);
        do t = {coord(rng), coord(rng)}; while (map[t] != 0);
        const double want = oracle::dijkstra(map, s)[t.row * 20 + t.col];
        const auto path = planner::a_star(s, t, map);
        if (!std::isfinite(want)) {
            if (!path.empty()) ++bad_paths;
            continue;
        }
        ++solvable;
        if (path.empty()) {
            ++false_empty;
            continue;
        }
        if (std::abs(path.total_cost - want) > 1e-9) ++mismatches;
        if (path.cells.front() != s || path.cells.back() != t) ++bad_paths;
        double sum = 0.0;
        for (std::size_t i = 1; i < path.cells.size(); ++i) {
            const Cell a = path.cells[i - 1], b = path.cells[i];
            const int dr = b.row - a.row, dc = b.col - a.col;
            if (std::abs(dr) > 1 || std::abs(dc) > 1 || (!dr && !dc) || map[b] != 0) ++bad_paths;
            if (dr && dc && (map[Cell{a.row + dr, a.col}] != 0 || map[Cell{a.row, a.col + dc}] != 0)) ++corner_cuts;
            sum += (dr && dc) ? std::numbers::sqrt2 : 1.0;
        }
        if (std::abs(sum - path.total_cost) > 1e-9) ++bad_paths;
    }
    const double secs = seconds_since(t0);
    const bool ok = mismatches == 0 && corner_cuts == 0 && bad_paths == 0 && false_empty == 0 && secs <= 10.0;
    return {ok, fmt("500 grids, %d solvable pairs, %d cost mismatches, %d missed paths, %d corner cuts, %d invalid "
                    "paths, %.2f s (limit 10 s)",
                    solvable, mismatches, false_empty, corner_cuts, bad_paths, secs)};
}

// --- 2 ---------------------------------------------------------------------------------

Verdict waypoint_pruning() {
    const fs::path file = kData / "fixtures" / "planning.json";
    std::ifstream in(file);
    const auto doc = nlohmann::json::parse(in);
    const world::GridOptions opts{doc.at("resolution").get<double>(), doc.at("inflation_radius").get<int>()};
    double reduction_sum = 0.0;
    int cases = 0, segments = 0, clean = 0;
    std::string worst;
    double worst_reduction = 1.0;
    for (const auto& c : doc.at("cases")) {
        const auto& sc_doc = c.at("scenario");
        const world::Scenario sc = sc_doc.is_string()
                                       ? world::load_scenario_file(file.parent_path() / sc_doc.get<std::string>())
                                       : world::load_scenario(sc_doc);
        const auto map = world::create_grid_map(sc, opts);
        const Vec2 start{c["start"][0].get<double>(), c["start"][1].get<double>()};
        const Vec2 goal{c["goal"][0].get<double>(), c["goal"][1].get<double>()};
        const auto plan = planner::plan_global_path(start, goal, map);
        if (!plan.reachable) throw std::runtime_error("fixture " + c.at("name").get<std::string>() + " unreachable");
        const double n_cells = static_cast<double>(plan.grid_path.cells.size());
        const double reduction = 1.0 - static_cast<double>(plan.waypoints.size()) / n_cells;
        reduction_sum += reduction;
        ++cases;
        if (reduction < worst_reduction) worst_reduction = reduction, worst = c.at("name").get<std::string>();
        const auto& wc = plan.waypoints.cells;
        for (std::size_t i = 1; i < wc.size(); ++i) {
            ++segments;
            bool ok = true;
            for (const Cell x : oracle::supercover(wc[i - 1], wc[i])) ok = ok && oracle::free_cell(map, x.row, x.col);
            clean += ok;
        }
    }
    const double mean = 100.0 * reduction_sum / cases;
    const bool ok = mean >= 30.0 && clean == segments;
    return {ok, fmt("%d fixtures, mean waypoint reduction %.1f%% (min %.1f%% on %s; need >= 30%%), %d/%d segments "
                    "clear under the supercover oracle",
                    cases, mean, 100.0 * worst_reduction, worst.c_str(), clean, segments)};
}

// --- 3 ---------------------------------------------------------------------------------

Verdict controller_contracts() {
    using namespace control;
    const auto t0 = Clock::now();
    constexpr int N = 10'000;
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    int sat = 0, sum = 0, rev = 0, brake = 0;
    const PidGains gains;
    for (int i = 0; i < N; ++i) {
        ControllerState st;
        st.integral = uni(-gains.integral_limit, gains.integral_limit);
        st.prev_error = uni(-kPi, kPi);
        const double d = pid_step(uni(-50.0, 50.0), st, gains, uni(1e-3, 1.0));
        sat += std::abs(d) <= kPi / 5;
    }
    for (int i = 0; i < N; ++i) {
        const double v = uni(-3.0, 3.0);
        const auto w = wheel_split(v, uni(-kPi / 5, kPi / 5));
        sum += std::abs(w.left + w.right - 2 * v) <= 1e-12 * std::max(1.0, std::abs(v));
    }
    for (int i = 0; i < N; ++i) {
        // mix uniform headings with values straddling the threshold
        double e = i % 4 == 0 ? (kPi / 2) * (1 + uni(-1e-9, 1e-9)) : uni(-kPi, kPi);
        if (i % 2) e = -e;
        const auto c = modulate_velocity({uni(0.01, 10.0), e}, uni(-kPi / 5, kPi / 5), uni(0.1, 1.0));
        rev += c.reverse == (std::abs(e) > kPi / 2);
    }
    for (int i = 0; i < N; ++i) {
        const double e = i % 2 ? kPi / 3 : -kPi / 3;
        brake += modulate_velocity({uni(0.0, 10.0), e}, uni(-kPi / 5, kPi / 5), uni(0.01, 1.0)).v_base == 0.0;
    }
    const double secs = seconds_since(t0);
    const bool ok = sat == N && sum == N && rev == N && brake == N && secs <= 5.0;
    return {ok, fmt("|delta| <= pi/5 %d/%d, wheel sum %d/%d, reverse iff |e| > pi/2 %d/%d, zero speed at "
                    "|e| = pi/3 %d/%d, %.2f s (limit 5 s)",
                    sat, N, sum, N, rev, N, brake, N, secs)};
}

// --- 4 ---------------------------------------------------------------------------------

Verdict living_room_suite() {
    const auto t0 = Clock::now();
    const auto suite = eval::load_suite(kData / "suites" / "living_room.json");
    const auto report = eval::run_suite(suite, eval::Method::agent, {jobs()});
    const double secs = seconds_since(t0);
    const auto& a = report.totals;

    double tl_kitchen = 0.0, tl_bedroom = 0.0;
    for (const char* scene : {"kitchen", "bedroom"}) {
        const auto r = eval::run_suite(eval::load_suite(kData / "suites" / (std::string(scene) + ".json")),
                                       eval::Method::agent, {jobs()});
        (std::string(scene) == "kitchen" ? tl_kitchen : tl_bedroom) = r.totals.mean_tl;
    }

    const bool ne_ok = a.successes > 0 && a.mean_ne_success < 0.5;
    const bool sr_ok = a.sr_percent >= 70.0;
    const bool pl_ok = a.mean_pl <= 1.35;
    const bool spl_ok = a.spl >= 0.8 * a.sr_percent / 100.0;
    const bool tl_ok = a.mean_tl > tl_kitchen && tl_kitchen > tl_bedroom;
    const bool time_ok = secs <= 300.0;
    return {ne_ok && sr_ok && pl_ok && spl_ok && tl_ok && time_ok,
            fmt("%zu episodes: NE %.3f m over successes (< 0.5), SR %.1f%% (>= 70), PL %.3f (<= 1.35), SPL %.3f "
                "(>= %.3f), TL living %.3f > kitchen %.3f > bedroom %.3f: %s, %.1f s (limit 300 s)",
                a.episodes, a.mean_ne_success, a.sr_percent, a.mean_pl, a.spl, 0.8 * a.sr_percent / 100.0, a.mean_tl,
                tl_kitchen, tl_bedroom, tl_ok ? "yes" : "no", secs)};
}

// --- 5 ---------------------------------------------------------------------------------

Verdict parser_fuzz() {
    std::mt19937_64 rng(8675309);
    std::uniform_int_distribution<int> byte(0, 255), len(0, 256);
    const std::string markup = "<>/_ abcdefgz0123456789.-&;\n</thinking><reasoning>";
    std::uniform_int_distribution<std::size_t> sym(0, markup.size() - 1);
    int uncontrolled = 0, parsed = 0;
    for (int i = 0; i < 100'000; ++i) {
        std::string s;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) s += i % 2 ? static_cast<char>(byte(rng)) : markup[sym(rng)];
        try {
            const auto r = tools::parse_tool_call(s);
            if (r.call.has_value() == r.error.has_value()) ++uncontrolled;
            parsed += r.ok();
        } catch (...) {
            ++uncontrolled;
        }
    }

    const std::string ident = "abcdefghijklmnopqrstuvwxyz_0123456789";
    std::uniform_int_distribution<std::size_t> id(0, 25), id_rest(0, ident.size() - 1);
    std::uniform_int_distribution<int> name_len(0, 10), nargs(0, 6), kind(0, 2), ch(0x20, 0x7e);
    auto name = [&] {
        std::string s(1, ident[id(rng)]);
        for (int k = 0, m = name_len(rng); k < m; ++k) s += ident[id_rest(rng)];
        return s == "thinking" || s == "reasoning" ? s + "_" : s;
    };
    int round_trips = 0;
    for (int i = 0; i < 10'000; ++i) {
        tools::ToolCall c;
        c.tool = name();
        for (int k = 0, m = nargs(rng); k < m; ++k) {
            tools::ArgValue v;
            if (const int kd = kind(rng); kd == 0) {
                v = std::uniform_real_distribution<double>(-1e4, 1e4)(rng);
            } else if (kd == 1) {
                v = static_cast<double>(std::uniform_int_distribution<int>(-1000, 1000)(rng));
            } else {
                std::string s;
                for (int q = 0, m2 = 1 + name_len(rng); q < m2; ++q) s += static_cast<char>(ch(rng));
                const auto b = s.find_first_not_of(' ');
                s = b == std::string::npos ? "t" : s.substr(b, s.find_last_not_of(' ') - b + 1);
                if (tools::is_numeric_shaped(s)) s = "n" + s;
                v = s;
            }
            // a parameter named like its tool is ambiguous on the wire
            if (auto n = name(); n != c.tool) c.args[n] = v;
        }
        const auto r = tools::parse_tool_call(tools::serialize(c));
        round_trips += r.ok() && *r.call == c;
    }
    const bool ok = uncontrolled == 0 && round_trips == 10'000;
    return {ok, fmt("100000 random inputs, %d uncontrolled failures (%d parsed as calls), round trip %d/10000",
                    uncontrolled, parsed, round_trips)};
}

// --- 6 ---------------------------------------------------------------------------------

Verdict agent_loop() {
    const auto suite = eval::load_suite(kData / "suites" / "living_room.json");
    const auto reg = tools::make_default_registry(suite.settings);
    const std::map<std::string, std::string> vars{{"goal_x", "6.40"}, {"goal_y", "1.60"}};

    tools::NavWorld w1(suite.scenario, suite.settings);
    agent::ScriptedBackend malformed(agent::load_script_file(kData / "scripts" / "malformed_then_correct.json"), vars);
    const auto m = agent::run_episode("Go to the desk.", w1, malformed, reg, suite.agent);
    const std::size_t errors = m.transcript.tool_error_count();
    const bool m_ok = m.outcome.status == agent::EpisodeStatus::completed && errors == 1;

    tools::NavWorld w2(suite.scenario, suite.settings);
    agent::ScriptedBackend never(agent::load_script_file(kData / "scripts" / "never_complete.json"), vars);
    const auto n = agent::run_episode("Go to the desk.", w2, never, reg, suite.agent);
    const bool n_ok =
        n.outcome.status == agent::EpisodeStatus::budget_exhausted && n.outcome.turns_used == suite.agent.turn_budget;

    std::ifstream in(kData / "corpus" / "su_commands.json");
    const auto corpus = nlohmann::json::parse(in);
    const auto scene = world::load_scenario_file(kData / "corpus" / corpus.at("scene").get<std::string>());
    std::vector<std::vector<std::string>> issued, expected;
    for (const auto& c : corpus.at("commands")) {
        tools::NavWorld w(scene, suite.settings);
        agent::ScriptedBackend b(agent::parse_script(c.at("responses")));
        const auto run = agent::run_episode(c.at("command").get<std::string>(), w, b, reg, suite.agent);
        issued.push_back(run.outcome.validated_tools());
        expected.push_back(c.at("expected_tools").get<std::vector<std::string>>());
    }
    const double su = eval::compute_su(issued, expected);
    const bool ok = m_ok && n_ok && issued.size() == 20 && su == 1.0;
    return {ok, fmt("malformed_then_correct %s with %zu TOOL_ERROR entries; never_complete %s after %zu/%zu turns; "
                    "scripted SU %.2f on %zu commands",
                    std::string(agent::to_string(m.outcome.status)).c_str(), errors,
                    std::string(agent::to_string(n.outcome.status)).c_str(), n.outcome.turns_used,
                    suite.agent.turn_budget, su, issued.size())};
}

// --- 7 ---------------------------------------------------------------------------------

Verdict determinism() {
    std::string csv[2];
    for (auto& out : csv) {
        const auto suite = eval::load_suite(kData / "suites" / "living_room.json", 7);
        std::ostringstream os;
        eval::write_episodes_csv(os, eval::run_suite(suite, eval::Method::agent, {jobs()}));
        out = os.str();
    }
    const bool ok = csv[0] == csv[1] && !csv[0].empty();
    const auto lines = std::count(csv[0].begin(), csv[0].end(), '\n');
    return {ok, fmt("two seeded runs of the living room suite: %ld CSV lines, %zu bytes, %s", static_cast<long>(lines),
                    csv[0].size(), ok ? "byte-identical" : "different")};
}

}  // namespace

int main() {
    report(1, astar_vs_dijkstra);
    report(2, waypoint_pruning);
    report(3, controller_contracts);
    report(4, living_room_suite);
    report(5, parser_fuzz);
    report(6, agent_loop);
    report(7, determinism);
    std::printf("%s: %d of 7 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
