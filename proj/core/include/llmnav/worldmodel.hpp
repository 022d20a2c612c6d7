#pragma once

#include <llmnav/geometry.hpp>

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace llmnav::world {

inline constexpr int kDefaultRobotId = 1;
inline constexpr double kDefaultResolution = 0.05;
inline constexpr int kDefaultInflationRadius = 4;
/// Upper bound on rows * cols accepted by create_grid_map.
inline constexpr std::size_t kDefaultCellBudget = 4'000'000;

struct SceneObject {
    std::string label;
    Rect footprint;
};

/// Static description of one room: bounds, furniture footprints and robot spawn.
struct Scenario {
    std::string name;
    Rect bounds;
    std::vector<SceneObject> objects;
    Pose2 spawn;
    int robot_id = kDefaultRobotId;
};

/// Parses and validates a scenario document. Throws ScenarioError naming the bad field.
Scenario load_scenario(const nlohmann::json& doc, int expected_robot_id = kDefaultRobotId);
Scenario load_scenario_file(const std::filesystem::path& path,
                            int expected_robot_id = kDefaultRobotId);
nlohmann::json to_json(const Scenario& scenario);

/// Checks every Scenario invariant; throws ScenarioError on the first violation.
void validate_scenario(const Scenario& scenario, int expected_robot_id = kDefaultRobotId);

/// Binary occupancy grid (1 = obstacle) with world-frame metadata.
///
/// Cell (row, col) covers [origin.x + col*res, origin.x + (col+1)*res] horizontally and
/// the matching interval in y. Instances are immutable once built.
class GridMap {
public:
    GridMap() = default;
    GridMap(int rows, int cols, double resolution, Vec2 origin, int inflation_radius_cells = 0);
    GridMap(int rows, int cols, double resolution, Vec2 origin, int inflation_radius_cells,
            std::vector<std::uint8_t> cells);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    double resolution() const noexcept { return resolution_; }
    Vec2 origin() const noexcept { return origin_; }
    int inflation_radius_cells() const noexcept { return inflation_radius_; }

    bool in_range(Cell c) const noexcept {
        return c.row >= 0 && c.col >= 0 && c.row < rows_ && c.col < cols_;
    }
    /// Unchecked access. Use in_range first.
    std::uint8_t operator[](Cell c) const noexcept {
        return cells_[static_cast<std::size_t>(c.row) * cols_ + c.col];
    }
    /// Checked access; throws RangeError.
    std::uint8_t at(Cell c) const;
    bool is_free(Cell c) const noexcept { return in_range(c) && (*this)[c] == 0; }
    bool is_obstacle(Cell c) const noexcept { return in_range(c) && (*this)[c] != 0; }

    std::span<const std::uint8_t> cells() const noexcept { return cells_; }
    std::size_t obstacle_count() const noexcept;

    /// Closed square covered by a cell, in world coordinates.
    Rect cell_rect(Cell c) const noexcept;

    friend bool operator==(const GridMap&, const GridMap&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    double resolution_ = kDefaultResolution;
    Vec2 origin_;
    int inflation_radius_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// floor-binned world -> grid transform. Points on the far map edge map to the last cell.
Cell world_to_grid(Vec2 pos, const GridMap& map);
/// Center of a cell in world coordinates.
Vec2 grid_to_world(Cell cell, const GridMap& map);

struct GridOptions {
    double resolution = kDefaultResolution;
    int inflation_radius = kDefaultInflationRadius;
    std::size_t cell_budget = kDefaultCellBudget;
};

/// Rasterizes object footprints (closed-square intersection) and applies Chebyshev inflation.
GridMap create_grid_map(const Scenario& scenario, const GridOptions& options = {});

/// Square (Chebyshev) dilation of the 1-cells by `radius` cells.
GridMap inflate(const GridMap& raw, int radius);

/// Obstacle coordinates of a grid, row-major ascending.
std::vector<Cell> extract_obstacles(const GridMap& map);

/// Inverse of extract_obstacles: an otherwise free grid with the listed cells set.
GridMap rasterize_obstacles(std::span<const Cell> obstacles, int rows, int cols,
                            double resolution, Vec2 origin, int inflation_radius_cells = 0);

/// Compact export: resolution, origin, rows, cols, inflation radius and the obstacle list.
nlohmann::json export_grid_map(const GridMap& map);
GridMap import_grid_map(const nlohmann::json& doc);

}  // namespace llmnav::world
