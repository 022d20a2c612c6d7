#include <llmnav/evalharness.hpp>

#include <llmnav/error.hpp>
#include <llmnav/planner.hpp>
#include <llmnav/prompt.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace llmnav::eval {

using nlohmann::json;

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::arrived: return "arrived";
        case Termination::collision: return "collision";
        case Termination::timeout: return "timeout";
        case Termination::not_started: return "not_started";
    }
    return "unknown";
}

std::string_view to_string(Method m) { return m == Method::agent ? "agent" : "baseline"; }

namespace {

Termination termination_from_string(std::string_view s) {
    if (s == "arrived") return Termination::arrived;
    if (s == "collision") return Termination::collision;
    if (s == "timeout") return Termination::timeout;
    if (s == "not_started") return Termination::not_started;
    throw InputError("unknown termination '" + std::string(s) + "'");
}

Termination termination_of(const std::optional<control::MotionOutcome>& m) {
    if (!m) return Termination::not_started;
    switch (m->status) {
        case control::MotionStatus::success: return Termination::arrived;
        case control::MotionStatus::collision: return Termination::collision;
        case control::MotionStatus::timeout: return Termination::timeout;
    }
    return Termination::not_started;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s == "-0" || s.rfind("-0.", 0) == 0) {
        // avoid "-0.000" noise in deterministic output
        if (std::all_of(s.begin() + 1, s.end(), [](char c) { return c == '0' || c == '.'; })) s.erase(0, 1);
    }
    return s;
}

std::string substitute(std::string text, const std::map<std::string, std::string>& vars) {
    for (const auto& [key, value] : vars) {
        const std::string token = "{{" + key + "}}";
        for (std::size_t pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size()))
            text.replace(pos, token.size(), value);
    }
    return text;
}

std::map<std::string, std::string> episode_vars(const EpisodeSpec& e, const SuiteConfig& suite) {
    return {{"goal_x", fixed(e.goal.x, 2)},
            {"goal_y", fixed(e.goal.y, 2)},
            {"start_x", fixed(e.start.position.x, 2)},
            {"start_y", fixed(e.start.position.y, 2)},
            {"scenario", suite.scenario.name},
            {"robot_id", std::to_string(suite.settings.constraints.robot_id)},
            {"episode", e.id}};
}

// Optimal grid length on the suite's map, or empty when no path exists.
std::optional<double> shortest_length(const EpisodeSpec& e, const world::GridMap& map) {
    const planner::PlanResult plan = planner::plan_global_path(e.start.position, e.goal, map);
    if (!plan.reachable) return std::nullopt;
    return plan.length_m;
}

}  // namespace

// --- metrics -----------------------------------------------------------------------------

EpisodeMetrics compute_metrics(std::span<const Vec2> trajectory, Vec2 goal, std::optional<double> shortest,
                               Termination termination, double margin) {
    if (trajectory.empty()) throw InputError("trajectory is empty");
    if (shortest && !(*shortest >= 0.0)) throw InputError("shortest length must be non-negative");
    if (shortest && *shortest == 0.0 && distance(trajectory.front(), goal) > 1e-9)
        throw InputError("degenerate instance: zero shortest length between distinct start and goal");

    EpisodeMetrics m;
    m.termination = termination;
    m.shortest = shortest;
    for (std::size_t i = 1; i < trajectory.size(); ++i) m.tl += distance(trajectory[i - 1], trajectory[i]);
    m.ne = distance(trajectory.back(), goal);
    m.success = m.ne < margin && termination != Termination::collision;
    if (m.success && shortest) {
        const double denom = std::max(m.tl, *shortest);
        m.spl = denom > 0.0 ? *shortest / denom : 1.0;
        if (*shortest > 0.0) {
            m.pl_raw = m.tl / *shortest;
            m.pl = std::max(1.0, *m.pl_raw);
        } else {
            m.pl_raw = 1.0;
            m.pl = 1.0;
        }
    }
    return m;
}

bool contains_in_order(std::span<const std::string> issued, std::span<const std::string> expected) {
    std::size_t k = 0;
    for (const auto& name : issued) {
        if (k == expected.size()) break;
        if (name == expected[k]) ++k;
    }
    return k == expected.size();
}

double compute_su(std::span<const std::vector<std::string>> issued, std::span<const std::vector<std::string>> expected) {
    if (issued.size() != expected.size()) throw InputError("issued and expected sequences differ in count");
    if (issued.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < issued.size(); ++i)
        if (contains_in_order(issued[i], expected[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(issued.size());
}

Aggregates aggregate(std::span<const EpisodeMetrics> episodes) {
    Aggregates a;
    a.episodes = episodes.size();
    if (episodes.empty()) return a;
    double ne_success = 0.0, pl_sum = 0.0, spl_sum = 0.0;
    std::size_t su_n = 0, su_hits = 0;
    for (const auto& e : episodes) {
        a.mean_tl += e.tl;
        a.mean_ne += e.ne;
        spl_sum += e.spl;
        if (e.success) {
            ++a.successes;
            ne_success += e.ne;
            if (e.pl) pl_sum += *e.pl;
        }
        if (e.su) {
            ++su_n;
            if (*e.su) ++su_hits;
        }
    }
    const double n = static_cast<double>(a.episodes);
    a.mean_tl /= n;
    a.mean_ne /= n;
    a.sr_percent = 100.0 * static_cast<double>(a.successes) / n;
    a.spl = spl_sum / n;
    if (a.successes > 0) {
        a.mean_ne_success = ne_success / static_cast<double>(a.successes);
        a.mean_pl = pl_sum / static_cast<double>(a.successes);
    }
    if (su_n > 0) a.su = static_cast<double>(su_hits) / static_cast<double>(su_n);
    return a;
}

// --- configuration ---------------------------------------------------------------------------

std::vector<Vec2> sample_goals(const Rect& bounds, std::size_t count, std::uint64_t seed, double margin) {
    if (bounds.width() <= 2.0 * margin || bounds.height() <= 2.0 * margin)
        throw ConfigError("goal sampling margin leaves no area");
    // mt19937_64 output is fixed by the standard; the distributions are not, so map bits by hand.
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<Vec2> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = bounds.x_min + margin + unit() * (bounds.width() - 2.0 * margin);
        const double y = bounds.y_min + margin + unit() * (bounds.height() - 2.0 * margin);
        out.push_back({x, y});
    }
    return out;
}

namespace {

template <class T>
void read_opt(const json& obj, const char* key, T& out, const std::string& section) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(section + "." + key + " has the wrong type");
    }
}

const json& section(const json& doc, const char* name) {
    static const json empty = json::object();
    if (!doc.contains(name)) return empty;
    const json& s = doc.at(name);
    if (!s.is_object()) throw ConfigError(std::string("section '") + name + "' must be an object");
    return s;
}

Pose2 read_pose(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("x") || !j.contains("y")) throw ConfigError(where + " needs x and y");
    Pose2 p;
    try {
        p.position = {j.at("x").get<double>(), j.at("y").get<double>()};
        p.heading = wrap_angle(j.value("heading", 0.0));
    } catch (const json::exception&) {
        throw ConfigError(where + " has non-numeric fields");
    }
    return p;
}

}  // namespace

SuiteConfig parse_suite(const json& doc, const std::filesystem::path& base_dir,
                        std::optional<std::uint64_t> seed_override) {
    if (!doc.is_object()) throw ConfigError("suite document must be an object");
    SuiteConfig cfg;

    auto& st = cfg.settings;
    const json& grid = section(doc, "grid");
    read_opt(grid, "resolution", st.grid.resolution, "grid");
    read_opt(grid, "inflation_radius", st.grid.inflation_radius, "grid");
    read_opt(grid, "cell_budget", st.grid.cell_budget, "grid");
    st.constraints.resolution = st.grid.resolution;

    const json& ctl = section(doc, "controller");
    read_opt(ctl, "kp", st.controller.gains.kp, "controller");
    read_opt(ctl, "ki", st.controller.gains.ki, "controller");
    read_opt(ctl, "kd", st.controller.gains.kd, "controller");
    read_opt(ctl, "steering_limit", st.controller.gains.steering_limit, "controller");
    read_opt(ctl, "integral_limit", st.controller.gains.integral_limit, "controller");
    read_opt(ctl, "v0", st.controller.v0, "controller");
    read_opt(ctl, "max_steps", st.controller.max_steps, "controller");
    read_opt(ctl, "goal_margin", st.controller.goal_margin, "controller");

    const json& robot = section(doc, "robot");
    read_opt(robot, "wheel_base", st.robot.wheel_base, "robot");
    read_opt(robot, "body_radius", st.robot.body_radius, "robot");
    read_opt(robot, "max_wheel_speed", st.robot.max_wheel_speed, "robot");
    read_opt(robot, "dt", st.robot.dt, "robot");

    const json& cons = section(doc, "constraints");
    read_opt(cons, "max_velocity", st.constraints.max_velocity, "constraints");
    read_opt(cons, "robot_id", st.constraints.robot_id, "constraints");
    try {
        sim::validate(st.robot);
        tools::validate(st);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }

    if (!doc.contains("scenario")) throw ConfigError("missing 'scenario'");
    try {
        const json& sc = doc.at("scenario");
        if (sc.is_string()) {
            std::filesystem::path p = sc.get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            cfg.scenario = world::load_scenario_file(p, st.constraints.robot_id);
        } else {
            cfg.scenario = world::load_scenario(sc, st.constraints.robot_id);
        }
    } catch (const ScenarioError& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    } catch (const InputError& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    cfg.name = doc.value("name", cfg.scenario.name);

    const json& ag = section(doc, "agent");
    read_opt(ag, "turn_budget", cfg.agent.turn_budget, "agent");
    read_opt(ag, "context_budget_chars", cfg.agent.context.budget_chars, "agent");
    read_opt(ag, "window_pairs", cfg.agent.context.window_pairs, "agent");
    if (cfg.agent.turn_budget == 0) throw ConfigError("agent.turn_budget must be positive");
    if (ag.contains("backend")) {
        try {
            cfg.backend = agent::parse_backend_config(ag.at("backend"), base_dir);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("agent.backend: ") + e.what());
        }
    }

    const json& su = section(doc, "suite");
    std::uint64_t seed = 0;
    read_opt(su, "seed", seed, "suite");
    if (seed_override) seed = *seed_override;
    std::string command = "Navigate the robot to ({{goal_x}}, {{goal_y}}).";
    read_opt(su, "command_template", command, "suite");
    std::vector<std::string> expected{"create_grid_map", "plan_global_path", "motion_control"};
    read_opt(su, "expected_tools", expected, "suite");

    std::vector<Pose2> starts;
    if (su.contains("starts")) {
        if (!su.at("starts").is_array()) throw ConfigError("suite.starts must be an array");
        for (std::size_t i = 0; i < su.at("starts").size(); ++i)
            starts.push_back(read_pose(su.at("starts")[i], "suite.starts[" + std::to_string(i) + "]"));
    } else {
        starts.push_back(cfg.scenario.spawn);
    }

    std::vector<Vec2> goals;
    if (su.contains("goals")) {
        if (!su.at("goals").is_array()) throw ConfigError("suite.goals must be an array");
        for (std::size_t i = 0; i < su.at("goals").size(); ++i)
            goals.push_back(read_pose(su.at("goals")[i], "suite.goals[" + std::to_string(i) + "]").position);
    }
    if (su.contains("random_goals")) {
        const json& rg = su.at("random_goals");
        std::size_t count = 0;
        double margin = 0.3;
        read_opt(rg, "count", count, "suite.random_goals");
        read_opt(rg, "margin", margin, "suite.random_goals");
        const auto sampled = sample_goals(cfg.scenario.bounds, count, seed, margin);
        goals.insert(goals.end(), sampled.begin(), sampled.end());
    }
    if (goals.empty()) throw ConfigError("suite defines no goals");

    for (std::size_t s = 0; s < starts.size(); ++s) {
        for (std::size_t g = 0; g < goals.size(); ++g) {
            EpisodeSpec e;
            char id[48];
            std::snprintf(id, sizeof id, "s%02zu_g%02zu", s, g);
            e.id = id;
            e.start = starts[s];
            e.goal = goals[g];
            e.expected_tools = expected;
            e.seed = seed + cfg.episodes.size();
            cfg.episodes.push_back(std::move(e));
        }
    }
    for (auto& e : cfg.episodes) e.command = substitute(command, episode_vars(e, cfg));
    return cfg;
}

SuiteConfig load_suite(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open suite file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("suite file " + path.string() + ": " + e.what());
    }
    return parse_suite(doc, path.parent_path(), seed_override);
}

// --- running ---------------------------------------------------------------------------------

namespace {

std::string trajectory_csv(const sim::Simulator& sim) {
    std::ostringstream os;
    sim.log().write_csv(os);
    return os.str();
}

}  // namespace

EpisodeMetrics baseline_run(const EpisodeSpec& episode, const SuiteConfig& suite, EpisodeArtifacts* artifacts) {
    tools::NavWorld world(suite.scenario, suite.settings, episode.start);
    world.set_map(world::create_grid_map(suite.scenario, suite.settings.grid));
    const world::GridMap& map = *world.map();

    std::optional<double> shortest = shortest_length(episode, map);
    planner::PlanResult plan = planner::plan_global_path(episode.start.position, episode.goal, map);
    std::string note;
    if (plan.reachable) {
        world.set_plan(plan);
        world.set_motion(control::motion_control(plan.waypoints, world.simulator(), suite.settings.controller));
    } else {
        note = plan.reason;
    }

    const auto traj = world.simulator().log().positions();
    EpisodeMetrics m = compute_metrics(traj, episode.goal, shortest, termination_of(world.last_motion()));
    m.id = episode.id;
    m.status = world.last_motion() ? std::string(control::to_string(world.last_motion()->status)) : "unreachable";
    m.note = note;
    if (world.last_motion() && !world.last_motion()->collided_with.empty())
        m.note = "collided with " + world.last_motion()->collided_with;
    if (artifacts) {
        artifacts->trajectory = traj;
        artifacts->plan = plan;
        artifacts->trajectory_csv = trajectory_csv(world.simulator());
    }
    return m;
}

EpisodeMetrics agent_run(const EpisodeSpec& episode, const SuiteConfig& suite, const tools::ToolRegistry& registry,
                         EpisodeArtifacts* artifacts) {
    tools::NavWorld world(suite.scenario, suite.settings, episode.start);
    const world::GridMap reference = world::create_grid_map(suite.scenario, suite.settings.grid);
    const std::optional<double> shortest = shortest_length(episode, reference);

    auto backend = agent::make_backend(suite.backend, episode_vars(episode, suite));
    agent::EpisodeRun run = agent::run_episode(episode.command, world, *backend, registry, suite.agent);

    const auto traj = world.simulator().log().positions();
    EpisodeMetrics m = compute_metrics(traj, episode.goal, shortest, termination_of(world.last_motion()));
    m.id = episode.id;
    m.status = std::string(agent::to_string(run.outcome.status));
    m.turns = run.outcome.turns_used;
    m.note = run.outcome.failure_cause;
    if (!episode.expected_tools.empty()) m.su = contains_in_order(run.outcome.validated_tools(), episode.expected_tools);
    if (artifacts) {
        artifacts->trajectory = traj;
        artifacts->plan = world.plan();
        artifacts->transcript = std::move(run.transcript);
        artifacts->trajectory_csv = trajectory_csv(world.simulator());
    }
    return m;
}

MetricsReport run_suite(const SuiteConfig& suite, Method method, const RunOptions& options) {
    MetricsReport report;
    report.scene = suite.name;
    report.method = std::string(to_string(method));
    report.episodes.resize(suite.episodes.size());

    const tools::ToolRegistry registry = tools::make_default_registry(suite.settings);
    const bool keep = options.output_dir.has_value();
    std::optional<world::GridMap> plot_map;
    if (keep && options.write_plots) plot_map = world::create_grid_map(suite.scenario, suite.settings.grid);
    if (keep) {
        std::filesystem::create_directories(*options.output_dir);
        if (options.write_transcripts && method == Method::agent)
            std::filesystem::create_directories(*options.output_dir / "transcripts");
        if (options.write_plots) std::filesystem::create_directories(*options.output_dir / "plots");
        if (options.write_trajectories) std::filesystem::create_directories(*options.output_dir / "trajectories");
    }

    auto run_one = [&](std::size_t i) {
        const EpisodeSpec& e = suite.episodes[i];
        EpisodeArtifacts art;
        EpisodeMetrics m;
        try {
            m = method == Method::agent ? agent_run(e, suite, registry, keep ? &art : nullptr)
                                        : baseline_run(e, suite, keep ? &art : nullptr);
        } catch (const std::exception& ex) {
            m = EpisodeMetrics{};
            m.id = e.id;
            m.ne = distance(e.start.position, e.goal);
            m.status = "error";
            m.note = ex.what();
        }
        report.episodes[i] = m;
        if (!keep) return;
        const auto& dir = *options.output_dir;
        if (options.write_transcripts && art.transcript) {
            std::ofstream out(dir / "transcripts" / (e.id + ".jsonl"));
            art.transcript->write_jsonl(out);
        }
        if (options.write_trajectories && !art.trajectory_csv.empty()) {
            std::ofstream out(dir / "trajectories" / (e.id + ".csv"));
            out << art.trajectory_csv;
        }
        if (plot_map && !art.trajectory.empty()) {
            std::ofstream out(dir / "plots" / (e.id + ".svg"));
            out << render_svg(*plot_map, art.trajectory, art.plan ? &*art.plan : nullptr, e.goal);
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(suite.episodes.size())));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < suite.episodes.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < jobs; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < suite.episodes.size(); i = next++) run_one(i);
            });
    }

    report.totals = aggregate(report.episodes);
    if (keep) {
        const auto& dir = *options.output_dir;
        const std::string stem = report.method;
        {
            std::ofstream out(dir / (stem + "_episodes.jsonl"));
            write_episodes_jsonl(out, report);
        }
        {
            std::ofstream out(dir / (stem + "_episodes.csv"));
            write_episodes_csv(out, report);
        }
        const MetricsReport* one = &report;
        {
            std::ofstream out(dir / (stem + "_summary.csv"));
            write_summary_csv(out, std::span(one, 1));
        }
        {
            std::ofstream out(dir / (stem + "_summary.txt"));
            out << format_table(std::span(one, 1));
        }
    }
    return report;
}

// --- output ----------------------------------------------------------------------------------

namespace {

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_double(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::string opt_fixed(const std::optional<double>& v, int digits) { return v ? fixed(*v, digits) : ""; }

}  // namespace

json to_json(const EpisodeMetrics& m) {
    return json{{"id", m.id},
                {"tl", m.tl},
                {"ne", m.ne},
                {"success", m.success},
                {"shortest", opt_json(m.shortest)},
                {"pl", opt_json(m.pl)},
                {"pl_raw", opt_json(m.pl_raw)},
                {"spl", m.spl},
                {"su", m.su ? json(*m.su) : json(nullptr)},
                {"termination", std::string(to_string(m.termination))},
                {"status", m.status},
                {"turns", m.turns},
                {"note", m.note}};
}

EpisodeMetrics episode_from_json(const json& j) {
    try {
        EpisodeMetrics m;
        m.id = j.at("id").get<std::string>();
        m.tl = j.at("tl").get<double>();
        m.ne = j.at("ne").get<double>();
        m.success = j.at("success").get<bool>();
        m.shortest = opt_double(j, "shortest");
        m.pl = opt_double(j, "pl");
        m.pl_raw = opt_double(j, "pl_raw");
        m.spl = j.at("spl").get<double>();
        if (j.contains("su") && !j.at("su").is_null()) m.su = j.at("su").get<bool>();
        m.termination = termination_from_string(j.value("termination", "not_started"));
        m.status = j.value("status", "");
        m.turns = j.value("turns", std::size_t{0});
        m.note = j.value("note", "");
        return m;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed episode record: ") + e.what());
    }
}

void write_episodes_jsonl(std::ostream& out, const MetricsReport& report) {
    for (const auto& m : report.episodes) {
        json row = to_json(m);
        row["scene"] = report.scene;
        row["method"] = report.method;
        out << row.dump() << '\n';
    }
}

MetricsReport read_episodes_jsonl(std::istream& in) {
    MetricsReport r;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError("line " + std::to_string(n) + ": " + e.what());
        }
        if (r.episodes.empty()) {
            r.scene = row.value("scene", "");
            r.method = row.value("method", "");
        }
        r.episodes.push_back(episode_from_json(row));
    }
    r.totals = aggregate(r.episodes);
    return r;
}

void write_episodes_csv(std::ostream& out, const MetricsReport& report) {
    out << "scene,method,id,tl,ne,success,shortest,pl,pl_raw,spl,su,termination,status,turns\n";
    for (const auto& m : report.episodes) {
        out << report.scene << ',' << report.method << ',' << m.id << ',' << fixed(m.tl, 6) << ',' << fixed(m.ne, 6)
            << ',' << (m.success ? 1 : 0) << ',' << opt_fixed(m.shortest, 6) << ',' << opt_fixed(m.pl, 6) << ','
            << opt_fixed(m.pl_raw, 6) << ',' << fixed(m.spl, 6) << ',' << (m.su ? (*m.su ? "1" : "0") : "") << ','
            << to_string(m.termination) << ',' << m.status << ',' << m.turns << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const MetricsReport> reports) {
    out << "scene,method,episodes,tl,ne,ne_success,sr,pl,spl,su\n";
    for (const auto& r : reports) {
        const auto& a = r.totals;
        out << r.scene << ',' << r.method << ',' << a.episodes << ',' << fixed(a.mean_tl, 4) << ','
            << fixed(a.mean_ne, 4) << ',' << fixed(a.mean_ne_success, 4) << ',' << fixed(a.sr_percent, 2) << ','
            << fixed(a.mean_pl, 4) << ',' << fixed(a.spl, 4) << ',' << opt_fixed(a.su, 2) << '\n';
    }
}

std::string format_table(std::span<const MetricsReport> reports) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %-9s %5s %8s %7s %7s %6s %6s %5s\n", "scene", "method", "n", "TL(m)",
                  "NE(m)", "SR(%)", "PL", "SPL", "SU");
    os << line;
    for (const auto& r : reports) {
        const auto& a = r.totals;
        const std::string su = a.su ? fixed(*a.su, 2) : "-";
        std::snprintf(line, sizeof line, "%-18s %-9s %5zu %8.3f %7.3f %7.2f %6.3f %6.3f %5s\n", r.scene.c_str(),
                      r.method.c_str(), a.episodes, a.mean_tl, a.mean_ne_success, a.sr_percent, a.mean_pl, a.spl,
                      su.c_str());
        os << line;
    }
    os << "NE is averaged over successful episodes; PL over successful episodes (floored at 1).\n";
    return os.str();
}

std::string render_svg(const world::GridMap& map, std::span<const Vec2> trajectory, const planner::PlanResult* plan,
                       Vec2 goal) {
    const double res = map.resolution();
    const double w = map.cols() * res, h = map.rows() * res;
    const double scale = 100.0;  // px per meter
    auto px = [&](Vec2 p) {
        return fixed((p.x - map.origin().x) * scale, 1) + "," + fixed((h - (p.y - map.origin().y)) * scale, 1);
    };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(w * scale, 0) << "\" height=\""
       << fixed(h * scale, 0) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g fill=\"#999\">\n";
    // one rect per horizontal run of occupied cells
    for (int r = 0; r < map.rows(); ++r) {
        for (int c = 0; c < map.cols();) {
            if (!map.is_obstacle({r, c})) {
                ++c;
                continue;
            }
            int end = c;
            while (end < map.cols() && map.is_obstacle({r, end})) ++end;
            os << "<rect x=\"" << fixed(c * res * scale, 1) << "\" y=\"" << fixed((h - (r + 1) * res) * scale, 1)
               << "\" width=\"" << fixed((end - c) * res * scale, 1) << "\" height=\"" << fixed(res * scale, 1)
               << "\"/>\n";
            c = end;
        }
    }
    os << "</g>\n";
    if (plan && plan->reachable) {
        os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-dasharray=\"6,4\" stroke-width=\"2\" points=\"";
        for (const auto& p : plan->waypoints.points) os << px(p) << ' ';
        os << "\"/>\n";
    }
    if (!trajectory.empty()) {
        os << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
        const std::size_t stride = std::max<std::size_t>(1, trajectory.size() / 2000);
        for (std::size_t i = 0; i < trajectory.size(); i += stride) os << px(trajectory[i]) << ' ';
        os << px(trajectory.back()) << "\"/>\n";
        const auto s = px(trajectory.front());
        os << "<circle cx=\"" << s.substr(0, s.find(',')) << "\" cy=\"" << s.substr(s.find(',') + 1)
           << "\" r=\"6\" fill=\"#2ca02c\"/>\n";
    }
    const auto g = px(goal);
    os << "<circle cx=\"" << g.substr(0, g.find(',')) << "\" cy=\"" << g.substr(g.find(',') + 1)
       << "\" r=\"6\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n</svg>\n";
    return os.str();
}

}  // namespace llmnav::eval
