#pragma once

#include <llmnav/agent.hpp>
#include <llmnav/geometry.hpp>
#include <llmnav/tools.hpp>
#include <llmnav/worldmodel.hpp>

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace llmnav::eval {

inline constexpr double kSuccessMargin = 0.5;

struct EpisodeSpec {
    std::string id;
    Pose2 start;
    Vec2 goal;
    std::string command;
    /// Tool names the command should translate into, in order (for SU).
    std::vector<std::string> expected_tools;
    std::uint64_t seed = 0;
};

/// How the robot's run ended, as far as success accounting cares.
enum class Termination { arrived, collision, timeout, not_started };

std::string_view to_string(Termination t);

struct EpisodeMetrics {
    std::string id;
    double tl = 0.0;  ///< traveled length, m
    double ne = 0.0;  ///< final distance to goal, m
    bool success = false;
    /// Optimal grid length (cost * resolution); empty when the goal is unreachable.
    std::optional<double> shortest;
    /// TL / shortest floored at 1, successful episodes only.
    std::optional<double> pl;
    std::optional<double> pl_raw;
    double spl = 0.0;
    /// Empty in baseline mode.
    std::optional<bool> su;
    Termination termination = Termination::not_started;
    std::string status;
    std::size_t turns = 0;
    std::string note;
};

/// TL, NE, success (NE < margin and no collision), PL and the SPL term of one episode.
/// Throws InputError for an empty trajectory or a zero shortest length between distinct
/// start and goal points.
EpisodeMetrics compute_metrics(std::span<const Vec2> trajectory, Vec2 goal, std::optional<double> shortest,
                               Termination termination, double margin = kSuccessMargin);

/// True when `expected` appears in `issued` as an ordered subsequence.
bool contains_in_order(std::span<const std::string> issued, std::span<const std::string> expected);

/// Mean over episodes of the subsequence indicator.
double compute_su(std::span<const std::vector<std::string>> issued, std::span<const std::vector<std::string>> expected);

struct Aggregates {
    std::size_t episodes = 0;
    std::size_t successes = 0;
    double mean_tl = 0.0;
    double mean_ne = 0.0;
    double mean_ne_success = 0.0;
    double sr_percent = 0.0;
    double mean_pl = 0.0;
    double spl = 0.0;
    std::optional<double> su;
};

Aggregates aggregate(std::span<const EpisodeMetrics> episodes);

struct MetricsReport {
    std::string scene;
    std::string method;
    std::vector<EpisodeMetrics> episodes;
    Aggregates totals;
};

/// Everything needed to run one scene's episodes.
struct SuiteConfig {
    std::string name;
    world::Scenario scenario;
    tools::NavSettings settings;
    agent::AgentConfig agent;
    agent::BackendConfig backend;
    std::vector<EpisodeSpec> episodes;
};

/// Reads a suite document. Sections: scenario, grid, controller, robot, constraints,
/// agent (with backend), suite (starts, goals or random_goals, command_template,
/// expected_tools, seed). Relative paths resolve against `base_dir`.
/// Throws ConfigError on any problem.
SuiteConfig parse_suite(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                        std::optional<std::uint64_t> seed_override = std::nullopt);
SuiteConfig load_suite(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Deterministic goal sampler (platform-independent): uniform points inside the bounds
/// shrunk by `margin`.
std::vector<Vec2> sample_goals(const Rect& bounds, std::size_t count, std::uint64_t seed, double margin);

/// Per-episode artifacts kept for output files.
struct EpisodeArtifacts {
    std::vector<Vec2> trajectory;
    std::optional<planner::PlanResult> plan;
    std::optional<agent::Transcript> transcript;
    std::string trajectory_csv;
};

/// Conventional pipeline: create_grid_map -> plan_global_path -> motion_control, no model.
EpisodeMetrics baseline_run(const EpisodeSpec& episode, const SuiteConfig& suite, EpisodeArtifacts* artifacts = nullptr);

/// Agent pipeline with a fresh backend built from the suite's backend config.
EpisodeMetrics agent_run(const EpisodeSpec& episode, const SuiteConfig& suite, const tools::ToolRegistry& registry,
                         EpisodeArtifacts* artifacts = nullptr);

enum class Method { agent, baseline };

std::string_view to_string(Method m);

struct RunOptions {
    unsigned jobs = 1;
    /// When set, episode JSONL / CSV, summary table and CSV are written here.
    std::optional<std::filesystem::path> output_dir;
    bool write_transcripts = true;
    bool write_plots = false;
    bool write_trajectories = false;
};

/// Runs every episode with a fresh simulator; an episode that throws becomes a failed row.
MetricsReport run_suite(const SuiteConfig& suite, Method method, const RunOptions& options = {});

// --- output ----------------------------------------------------------------------------

nlohmann::json to_json(const EpisodeMetrics& m);
EpisodeMetrics episode_from_json(const nlohmann::json& j);

void write_episodes_jsonl(std::ostream& out, const MetricsReport& report);
/// Reads rows written by write_episodes_jsonl and recomputes the aggregates.
MetricsReport read_episodes_jsonl(std::istream& in);
/// Fixed-precision per-episode CSV; byte-identical across runs of the same suite.
void write_episodes_csv(std::ostream& out, const MetricsReport& report);
void write_summary_csv(std::ostream& out, std::span<const MetricsReport> reports);
/// Plain-text results table with TL, NE, SR, PL, SPL and SU columns.
std::string format_table(std::span<const MetricsReport> reports);

/// SVG of the inflated grid, the planned waypoints and the driven trajectory.
std::string render_svg(const world::GridMap& map, std::span<const Vec2> trajectory, const planner::PlanResult* plan,
                       Vec2 goal);

}  // namespace llmnav::eval
