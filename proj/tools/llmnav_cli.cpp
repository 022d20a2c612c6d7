// llmnav command-line front end: run suites, plan single queries, replay transcripts,
// and tabulate stored results.
//
// Exit codes: 0 success, 1 run failure (an episode errored or I/O failed), 2 config error.

#include <llmnav/agent.hpp>
#include <llmnav/error.hpp>
#include <llmnav/evalharness.hpp>
#include <llmnav/planner.hpp>
#include <llmnav/prompt.hpp>
#include <llmnav/tools.hpp>
#include <llmnav/worldmodel.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <vector>

namespace fs = std::filesystem;
using namespace llmnav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct RunArgs {
    std::vector<std::string> suites;
    std::string mode = "both";
    std::string out;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
    bool plots = false;
    bool trajectories = false;
    bool no_transcripts = false;
};

int cmd_run(const RunArgs& a) {
    std::vector<eval::Method> methods;
    if (a.mode == "agent" || a.mode == "both") methods.push_back(eval::Method::agent);
    if (a.mode == "baseline" || a.mode == "both") methods.push_back(eval::Method::baseline);

    std::vector<eval::SuiteConfig> suites;
    for (const auto& path : a.suites) suites.push_back(eval::load_suite(path, a.seed));

    std::vector<eval::MetricsReport> reports;
    bool any_error = false;
    for (const auto& suite : suites) {
        for (eval::Method m : methods) {
            eval::RunOptions opts;
            opts.jobs = a.jobs;
            if (!a.out.empty()) opts.output_dir = fs::path(a.out) / suite.name;
            opts.write_plots = a.plots;
            opts.write_trajectories = a.trajectories;
            opts.write_transcripts = !a.no_transcripts;
            const auto t0 = std::chrono::steady_clock::now();
            reports.push_back(eval::run_suite(suite, m, opts));
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cerr << suite.name << " [" << eval::to_string(m) << "]: " << suite.episodes.size() << " episodes in "
                      << secs << " s\n";
            for (const auto& e : reports.back().episodes) {
                if (e.status == "error") {
                    any_error = true;
                    std::cerr << "  " << e.id << ": " << e.note << '\n';
                }
            }
        }
    }
    std::cout << eval::format_table(reports);
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        std::ofstream csv(fs::path(a.out) / "summary.csv");
        eval::write_summary_csv(csv, reports);
        std::ofstream txt(fs::path(a.out) / "summary.txt");
        txt << eval::format_table(reports);
    }
    return any_error ? kExitFailure : kExitOk;
}

struct PlanArgs {
    std::string scenario;
    std::vector<double> goal;
    std::vector<double> start;
    double resolution = world::kDefaultResolution;
    int inflation = world::kDefaultInflationRadius;
    std::string svg;
};

int cmd_plan(const PlanArgs& a) {
    const world::Scenario sc = world::load_scenario_file(a.scenario);
    const world::GridMap map = world::create_grid_map(sc, {a.resolution, a.inflation});
    const Vec2 start = a.start.empty() ? sc.spawn.position : Vec2{a.start[0], a.start[1]};
    const Vec2 goal{a.goal[0], a.goal[1]};
    const planner::PlanResult plan = planner::plan_global_path(start, goal, map);
    std::cout << planner::path_to_json(plan).dump(2) << '\n';
    if (!a.svg.empty()) {
        std::ofstream out(a.svg);
        const std::vector<Vec2> traj{start};
        out << eval::render_svg(map, traj, &plan, goal);
    }
    return plan.reachable ? kExitOk : kExitFailure;
}

struct ReplayArgs {
    std::string transcript;
    std::string suite;
    std::vector<double> start;
    std::string trajectory_out;
};

int cmd_replay(const ReplayArgs& a) {
    const eval::SuiteConfig suite = eval::load_suite(a.suite);
    std::ifstream in(a.transcript);
    if (!in) throw ConfigError("cannot open transcript " + a.transcript);
    const agent::Transcript transcript = agent::Transcript::read_jsonl(in);
    Pose2 start = suite.scenario.spawn;
    if (!a.start.empty()) start = {{a.start[0], a.start[1]}, a.start.size() > 2 ? a.start[2] : 0.0};
    tools::NavWorld world(suite.scenario, suite.settings, start);
    const auto registry = tools::make_default_registry(suite.settings);
    const auto results = agent::replay_transcript(transcript, world, registry);
    bool all_ok = true;
    for (const auto& r : results) {
        std::cout << r.feedback_text << '\n';
        all_ok = all_ok && r.ok();
    }
    const Pose2 p = world.simulator().state().pose;
    std::cout << "final pose: (" << p.position.x << ", " << p.position.y << ", " << p.heading << ")\n";
    if (!a.trajectory_out.empty()) {
        std::ofstream out(a.trajectory_out);
        world.simulator().log().write_csv(out);
    }
    return all_ok ? kExitOk : kExitFailure;
}

int cmd_report(const std::vector<std::string>& files) {
    std::vector<eval::MetricsReport> reports;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw ConfigError("cannot open " + f);
        reports.push_back(eval::read_episodes_jsonl(in));
    }
    std::cout << eval::format_table(reports);
    return kExitOk;
}

int cmd_prompt(const std::string& suite_path) {
    tools::NavSettings settings;
    std::string scene = "living_room";
    if (!suite_path.empty()) {
        const auto suite = eval::load_suite(suite_path);
        settings = suite.settings;
        scene = suite.scenario.name;
    }
    const auto registry = tools::make_default_registry(settings);
    std::cout << prompt::render_system_prompt(registry, settings.constraints, scene);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"llmnav: tool-calling navigation stack"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run one or more episode suites");
    run_cmd->add_option("suites", run.suites, "Suite JSON files")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--mode", run.mode, "agent, baseline or both")
        ->check(CLI::IsMember({"agent", "baseline", "both"}));
    run_cmd->add_option("-o,--out", run.out, "Output directory for JSONL/CSV/summary files");
    run_cmd->add_option("-j,--jobs", run.jobs, "Parallel episodes")->check(CLI::Range(1u, 256u));
    run_cmd->add_option("--seed", run.seed, "Override the suite seed");
    run_cmd->add_flag("--plots", run.plots, "Write one SVG per episode");
    run_cmd->add_flag("--trajectories", run.trajectories, "Write one trajectory CSV per episode");
    run_cmd->add_flag("--no-transcripts", run.no_transcripts, "Skip transcript JSONL files");

    PlanArgs plan;
    auto* plan_cmd = app.add_subcommand("plan", "Plan a single path on a scenario");
    plan_cmd->add_option("scenario", plan.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    plan_cmd->add_option("--goal", plan.goal, "Goal x y (m)")->required()->expected(2);
    plan_cmd->add_option("--start", plan.start, "Start x y (m); defaults to the spawn")->expected(2);
    plan_cmd->add_option("--resolution", plan.resolution, "Cell size (m)");
    plan_cmd->add_option("--inflation", plan.inflation, "Inflation radius (cells)");
    plan_cmd->add_option("--svg", plan.svg, "Write an SVG of the plan");

    ReplayArgs replay;
    auto* replay_cmd = app.add_subcommand("replay", "Re-execute a stored transcript against a fresh world");
    replay_cmd->add_option("transcript", replay.transcript, "Transcript JSONL")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--suite", replay.suite, "Suite JSON providing scenario and settings")
        ->required()
        ->check(CLI::ExistingFile);
    replay_cmd->add_option("--start", replay.start, "Start x y [heading]; defaults to the spawn")->expected(2, 3);
    replay_cmd->add_option("--trajectory", replay.trajectory_out, "Write the re-simulated trajectory CSV");

    std::vector<std::string> report_files;
    auto* report_cmd = app.add_subcommand("report", "Tabulate episode JSONL files");
    report_cmd->add_option("files", report_files, "Episode JSONL files")->required()->check(CLI::ExistingFile);

    std::string prompt_suite;
    auto* prompt_cmd = app.add_subcommand("prompt", "Print the rendered system prompt");
    prompt_cmd->add_option("--suite", prompt_suite, "Suite JSON providing settings")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*plan_cmd) return cmd_plan(plan);
        if (*replay_cmd) return cmd_replay(replay);
        if (*report_cmd) return cmd_report(report_files);
        if (*prompt_cmd) return cmd_prompt(prompt_suite);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
