#pragma once

#include <llmnav/geometry.hpp>
#include <llmnav/worldmodel.hpp>

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace llmnav::planner {

inline constexpr double kDiagonalCost = std::numbers::sqrt2;
inline constexpr double kStraightCost = 1.0;
/// Maximum index jump considered when pruning a grid path.
inline constexpr std::size_t kLookAhead = 5;

/// Neighbor offsets, clockwise from north (north = +row).
inline constexpr std::array<Cell, 8> kNeighborOffsets{{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};

struct GridPath {
    std::vector<Cell> cells;
    /// Unitless: 1 per straight step, sqrt(2) per diagonal step.
    double total_cost = 0.0;

    bool empty() const noexcept { return cells.empty(); }
};

struct WaypointPath {
    std::vector<Vec2> points;
    std::vector<Cell> cells;
    /// Index of each waypoint in the source GridPath.
    std::vector<std::size_t> source_indices;

    bool empty() const noexcept { return points.empty(); }
    std::size_t size() const noexcept { return points.size(); }
};

/// Free 8-neighbors of `cell`; diagonals need both flanking cardinal cells free.
std::vector<Cell> get_neighbors(Cell cell, const world::GridMap& map);

/// Octile distance between cells (admissible and consistent for unit / sqrt(2) costs).
double octile_distance(Cell a, Cell b);

/// Per-step cost of moving between two 8-adjacent cells.
double step_cost(Cell a, Cell b);

/// Optimal 8-connected path. Empty when the goal is blocked or unreachable.
/// Throws InputError when the start is an obstacle, RangeError for out-of-range cells.
GridPath a_star(Cell start, Cell goal, const world::GridMap& map);

/// Cells touched by the segment between two cell centers, including both cells at
/// any grid corner the segment passes through exactly.
std::vector<Cell> supercover_line(Cell from, Cell to);

/// True when every cell of the supercover line is free.
bool segment_clear(Cell from, Cell to, const world::GridMap& map);

/// Greedy look-ahead pruning: from each kept index jump to the farthest index within
/// kLookAhead whose straight segment is clear.
WaypointPath simplify_path(const GridPath& path, const world::GridMap& map,
                           std::size_t look_ahead = kLookAhead);

/// Result of world-frame planning. `reachable == false` carries a human-readable reason.
struct PlanResult {
    bool reachable = false;
    std::string reason;
    GridPath grid_path;
    WaypointPath waypoints;
    /// grid_path.total_cost * resolution.
    double length_m = 0.0;
};

/// world_to_grid -> a_star -> simplify_path -> grid_to_world.
/// Throws InputError when the start cell is occupied, RangeError for out-of-bounds points.
PlanResult plan_global_path(Vec2 start_world, Vec2 goal_world, const world::GridMap& map);

/// Debug dump: waypoints in meters plus the raw cell trace.
nlohmann::json path_to_json(const PlanResult& plan);

}  // namespace llmnav::planner
