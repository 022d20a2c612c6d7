#include <llmnav/planner.hpp>

#include <llmnav/error.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <queue>

namespace llmnav::planner {

using world::GridMap;

namespace {

void require_in_range(Cell c, const GridMap& map, const char* what) {
    if (!map.in_range(c))
        throw RangeError(std::string(what) + " cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                         ") outside grid");
}

struct OpenEntry {
    double f;
    double g;
    std::uint64_t seq;
    int index;
};

// Min-f first; on equal f prefer larger g, then earlier insertion.
struct OpenOrder {
    bool operator()(const OpenEntry& a, const OpenEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g < b.g;
        return a.seq > b.seq;
    }
};

}  // namespace

std::vector<Cell> get_neighbors(Cell cell, const GridMap& map) {
    require_in_range(cell, map, "query");
    std::vector<Cell> out;
    out.reserve(8);
    for (const Cell& d : kNeighborOffsets) {
        const Cell n{cell.row + d.row, cell.col + d.col};
        if (!map.is_free(n)) continue;
        if (d.row != 0 && d.col != 0) {
            if (!map.is_free({cell.row + d.row, cell.col}) || !map.is_free({cell.row, cell.col + d.col})) continue;
        }
        out.push_back(n);
    }
    return out;
}

double octile_distance(Cell a, Cell b) {
    const int dr = std::abs(a.row - b.row);
    const int dc = std::abs(a.col - b.col);
    return std::max(dr, dc) + (kDiagonalCost - 1.0) * std::min(dr, dc);
}

double step_cost(Cell a, Cell b) {
    return (a.row != b.row && a.col != b.col) ? kDiagonalCost : kStraightCost;
}

GridPath a_star(Cell start, Cell goal, const GridMap& map) {
    require_in_range(start, map, "start");
    require_in_range(goal, map, "goal");
    if (map[start] != 0) throw InputError("start cell is an obstacle");
    if (map[goal] != 0) return {};

    const int cols = map.cols();
    const auto index_of = [cols](Cell c) { return c.row * cols + c.col; };
    const auto cell_of = [cols](int i) { return Cell{i / cols, i % cols}; };
    const std::size_t n = static_cast<std::size_t>(map.rows()) * cols;

    std::vector<double> g_cost(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
    std::uint64_t seq = 0;

    const int s = index_of(start);
    const int t = index_of(goal);
    g_cost[s] = 0.0;
    open.push({octile_distance(start, goal), 0.0, seq++, s});

    while (!open.empty()) {
        const OpenEntry top = open.top();
        open.pop();
        // Stale entry superseded by a cheaper re-queue of the same cell.
        if (top.g > g_cost[top.index]) continue;
        if (top.index == t) {
            GridPath path;
            path.total_cost = g_cost[t];
            for (int i = t; i != -1; i = parent[i]) path.cells.push_back(cell_of(i));
            std::reverse(path.cells.begin(), path.cells.end());
            return path;
        }
        const Cell u = cell_of(top.index);
        for (const Cell& v : get_neighbors(u, map)) {
            const int vi = index_of(v);
            const double tentative = g_cost[top.index] + step_cost(u, v);
            if (tentative < g_cost[vi]) {
                g_cost[vi] = tentative;
                parent[vi] = top.index;
                open.push({tentative + octile_distance(v, goal), tentative, seq++, vi});
            }
        }
    }
    return {};
}

std::vector<Cell> supercover_line(Cell from, Cell to) {
    // Cell centers sit on integer lattice points; boundaries sit at half-integers.
    const int dx = std::abs(to.col - from.col);
    const int dy = std::abs(to.row - from.row);
    const int sx = to.col > from.col ? 1 : -1;
    const int sy = to.row > from.row ? 1 : -1;
    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(dx + dy + 1));
    int x = from.col;
    int y = from.row;
    out.push_back({y, x});
    int ix = 0;
    int iy = 0;
    while (ix < dx || iy < dy) {
        // Compare the parameter of the next vertical crossing, (ix + 1/2)/dx, with the
        // next horizontal crossing, (iy + 1/2)/dy, in exact integer arithmetic.
        const long long vertical = static_cast<long long>(1 + 2 * ix) * dy;
        const long long horizontal = static_cast<long long>(1 + 2 * iy) * dx;
        if (ix < dx && iy < dy && vertical == horizontal) {
            out.push_back({y, x + sx});
            out.push_back({y + sy, x});
            x += sx;
            y += sy;
            ++ix;
            ++iy;
        } else if (iy >= dy || (ix < dx && vertical < horizontal)) {
            x += sx;
            ++ix;
        } else {
            y += sy;
            ++iy;
        }
        out.push_back({y, x});
    }
    return out;
}

bool segment_clear(Cell from, Cell to, const GridMap& map) {
    for (const Cell& c : supercover_line(from, to)) {
        if (!map.is_free(c)) return false;
    }
    return true;
}

WaypointPath simplify_path(const GridPath& path, const GridMap& map, std::size_t look_ahead) {
    WaypointPath out;
    if (path.cells.empty()) return out;
    if (look_ahead == 0) look_ahead = 1;
    const std::size_t last = path.cells.size() - 1;
    auto keep = [&](std::size_t i) {
        out.cells.push_back(path.cells[i]);
        out.points.push_back(world::grid_to_world(path.cells[i], map));
        out.source_indices.push_back(i);
    };
    keep(0);
    std::size_t i = 0;
    while (i < last) {
        std::size_t next = i + 1;
        for (std::size_t j = std::min(i + look_ahead, last); j > i + 1; --j) {
            if (segment_clear(path.cells[i], path.cells[j], map)) {
                next = j;
                break;
            }
        }
        keep(next);
        i = next;
    }
    return out;
}

PlanResult plan_global_path(Vec2 start_world, Vec2 goal_world, const GridMap& map) {
    const Cell start = world::world_to_grid(start_world, map);
    const Cell goal = world::world_to_grid(goal_world, map);
    if (map[start] != 0)
        throw InputError("start cell (" + std::to_string(start.row) + ", " + std::to_string(start.col) +
                         ") is occupied");
    PlanResult result;
    if (map[goal] != 0) {
        result.reason = "goal cell occupied";
        return result;
    }
    result.grid_path = a_star(start, goal, map);
    if (result.grid_path.empty()) {
        result.reason = "goal unreachable from start";
        return result;
    }
    result.reachable = true;
    result.length_m = result.grid_path.total_cost * map.resolution();
    result.waypoints = simplify_path(result.grid_path, map);
    return result;
}

nlohmann::json path_to_json(const PlanResult& plan) {
    nlohmann::json waypoints = nlohmann::json::array();
    for (const Vec2& p : plan.waypoints.points) waypoints.push_back({{"x", p.x}, {"y", p.y}});
    nlohmann::json trace = nlohmann::json::array();
    for (const Cell& c : plan.grid_path.cells) trace.push_back({c.row, c.col});
    nlohmann::json out{{"reachable", plan.reachable},
                       {"waypoints", std::move(waypoints)},
                       {"cells", std::move(trace)},
                       {"grid_cost", plan.grid_path.total_cost},
                       {"length_m", plan.length_m}};
    if (!plan.reachable) out["reason"] = plan.reason;
    return out;
}

}  // namespace llmnav::planner
