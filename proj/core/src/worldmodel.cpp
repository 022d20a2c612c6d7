#include <llmnav/worldmodel.hpp>

#include <llmnav/error.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace llmnav::world {

namespace {

// Absorbs representation error when a coordinate sits exactly on a cell boundary.
constexpr double kBinEpsilon = 1e-9;

double number_field(const nlohmann::json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioError(path + "." + key, "missing");
    if (!it->is_number()) throw ScenarioError(path + "." + key, "must be a number");
    double v = it->get<double>();
    if (!std::isfinite(v)) throw ScenarioError(path + "." + key, "must be finite");
    return v;
}

Rect rect_field(const nlohmann::json& obj, const std::string& path) {
    if (!obj.is_object()) throw ScenarioError(path, "must be an object");
    return Rect{number_field(obj, "x_min", path), number_field(obj, "y_min", path),
                number_field(obj, "x_max", path), number_field(obj, "y_max", path)};
}

nlohmann::json rect_json(const Rect& r) {
    return {{"x_min", r.x_min}, {"y_min", r.y_min}, {"x_max", r.x_max}, {"y_max", r.y_max}};
}

}  // namespace

void validate_scenario(const Scenario& s, int expected_robot_id) {
    if (!(s.bounds.width() > 0.0 && s.bounds.height() > 0.0))
        throw ScenarioError("bounds", "must have positive area");
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        const auto& obj = s.objects[i];
        const std::string path = "objects[" + std::to_string(i) + "]";
        if (!(obj.footprint.width() >= 0.0 && obj.footprint.height() >= 0.0))
            throw ScenarioError(path + ".rect", "x_min/y_min must not exceed x_max/y_max");
        if (!obj.footprint.intersects(s.bounds))
            throw ScenarioError(path + ".rect", "footprint of '" + obj.label + "' lies outside bounds");
    }
    if (!std::isfinite(s.spawn.heading)) throw ScenarioError("robot.heading", "must be finite");
    if (!s.bounds.contains(s.spawn.position)) throw ScenarioError("robot", "spawn outside bounds");
    for (const auto& obj : s.objects) {
        if (obj.footprint.contains(s.spawn.position))
            throw ScenarioError("robot", "spawn collides with object '" + obj.label + "'");
    }
    if (s.robot_id != expected_robot_id)
        throw ScenarioError("robot.id", "robot id " + std::to_string(s.robot_id) +
                                            " differs from configured id " +
                                            std::to_string(expected_robot_id));
}

Scenario load_scenario(const nlohmann::json& doc, int expected_robot_id) {
    if (!doc.is_object()) throw ScenarioError("<root>", "scenario document must be an object");
    Scenario s;
    auto name = doc.find("name");
    if (name == doc.end() || !name->is_string()) throw ScenarioError("name", "missing or not a string");
    s.name = name->get<std::string>();

    auto bounds = doc.find("bounds");
    if (bounds == doc.end()) throw ScenarioError("bounds", "missing");
    s.bounds = rect_field(*bounds, "bounds");

    if (auto objects = doc.find("objects"); objects != doc.end()) {
        if (!objects->is_array()) throw ScenarioError("objects", "must be an array");
        for (std::size_t i = 0; i < objects->size(); ++i) {
            const auto& o = (*objects)[i];
            const std::string path = "objects[" + std::to_string(i) + "]";
            if (!o.is_object()) throw ScenarioError(path, "must be an object");
            auto label = o.find("label");
            if (label == o.end() || !label->is_string()) throw ScenarioError(path + ".label", "missing or not a string");
            auto rect = o.find("rect");
            if (rect == o.end()) throw ScenarioError(path + ".rect", "missing");
            s.objects.push_back({label->get<std::string>(), rect_field(*rect, path + ".rect")});
        }
    }

    auto robot = doc.find("robot");
    if (robot == doc.end() || !robot->is_object()) throw ScenarioError("robot", "missing or not an object");
    s.spawn.position = {number_field(*robot, "x", "robot"), number_field(*robot, "y", "robot")};
    s.spawn.heading = robot->contains("heading") ? number_field(*robot, "heading", "robot") : 0.0;
    if (auto id = robot->find("id"); id != robot->end()) {
        if (!id->is_number_integer()) throw ScenarioError("robot.id", "must be an integer");
        s.robot_id = id->get<int>();
    } else {
        s.robot_id = expected_robot_id;
    }

    validate_scenario(s, expected_robot_id);
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path, int expected_robot_id) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("<file>", "cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError("<file>", path.string() + ": " + e.what());
    }
    return load_scenario(doc, expected_robot_id);
}

nlohmann::json to_json(const Scenario& s) {
    nlohmann::json objects = nlohmann::json::array();
    for (const auto& o : s.objects) objects.push_back({{"label", o.label}, {"rect", rect_json(o.footprint)}});
    return {{"name", s.name},
            {"bounds", rect_json(s.bounds)},
            {"objects", std::move(objects)},
            {"robot",
             {{"x", s.spawn.position.x}, {"y", s.spawn.position.y}, {"heading", s.spawn.heading}, {"id", s.robot_id}}}};
}

// --- GridMap ---------------------------------------------------------------

GridMap::GridMap(int rows, int cols, double resolution, Vec2 origin, int inflation_radius_cells)
    : GridMap(rows, cols, resolution, origin, inflation_radius_cells,
              std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(rows, 0)) *
                                        static_cast<std::size_t>(std::max(cols, 0)), 0)) {}

GridMap::GridMap(int rows, int cols, double resolution, Vec2 origin, int inflation_radius_cells,
                 std::vector<std::uint8_t> cells)
    : rows_(rows), cols_(cols), resolution_(resolution), origin_(origin),
      inflation_radius_(inflation_radius_cells), cells_(std::move(cells)) {
    if (rows <= 0 || cols <= 0) throw InputError("grid dimensions must be positive");
    if (!(resolution > 0.0) || !std::isfinite(resolution)) throw InputError("resolution must be positive");
    if (inflation_radius_cells < 0) throw InputError("inflation radius must be non-negative");
    if (cells_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw InputError("cell buffer does not match rows * cols");
    for (auto& v : cells_) {
        if (v > 1) throw InputError("cell values must be 0 or 1");
    }
}

std::uint8_t GridMap::at(Cell c) const {
    if (!in_range(c))
        throw RangeError("cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) + ") outside " +
                         std::to_string(rows_) + "x" + std::to_string(cols_) + " grid");
    return (*this)[c];
}

std::size_t GridMap::obstacle_count() const noexcept {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

Rect GridMap::cell_rect(Cell c) const noexcept {
    const double x0 = origin_.x + c.col * resolution_;
    const double y0 = origin_.y + c.row * resolution_;
    return {x0, y0, x0 + resolution_, y0 + resolution_};
}

// --- transforms ------------------------------------------------------------

Cell world_to_grid(Vec2 pos, const GridMap& map) {
    const double fx = (pos.x - map.origin().x) / map.resolution();
    const double fy = (pos.y - map.origin().y) / map.resolution();
    if (!std::isfinite(fx) || !std::isfinite(fy) || fx < -kBinEpsilon || fy < -kBinEpsilon ||
        fx > map.cols() + kBinEpsilon || fy > map.rows() + kBinEpsilon) {
        throw RangeError("position (" + std::to_string(pos.x) + ", " + std::to_string(pos.y) +
                         ") outside map bounds");
    }
    const int col = std::clamp(static_cast<int>(std::floor(fx + kBinEpsilon)), 0, map.cols() - 1);
    const int row = std::clamp(static_cast<int>(std::floor(fy + kBinEpsilon)), 0, map.rows() - 1);
    return {row, col};
}

Vec2 grid_to_world(Cell cell, const GridMap& map) {
    if (!map.in_range(cell))
        throw RangeError("cell (" + std::to_string(cell.row) + ", " + std::to_string(cell.col) +
                         ") outside grid");
    return {map.origin().x + (cell.col + 0.5) * map.resolution(),
            map.origin().y + (cell.row + 0.5) * map.resolution()};
}

// --- construction ----------------------------------------------------------

GridMap create_grid_map(const Scenario& scenario, const GridOptions& options) {
    const double res = options.resolution;
    if (!(res > 0.0) || !std::isfinite(res)) throw InputError("resolution must be positive");
    if (options.inflation_radius < 0) throw InputError("inflation radius must be non-negative");

    const double fr = std::ceil(scenario.bounds.height() / res - kBinEpsilon);
    const double fc = std::ceil(scenario.bounds.width() / res - kBinEpsilon);
    if (!(fr >= 1.0 && fc >= 1.0)) throw InputError("scenario bounds have no area");
    if (fr * fc > static_cast<double>(options.cell_budget))
        throw InputError("grid of " + std::to_string(static_cast<long long>(fr)) + "x" +
                         std::to_string(static_cast<long long>(fc)) + " cells exceeds budget of " +
                         std::to_string(options.cell_budget));
    const int rows = static_cast<int>(fr);
    const int cols = static_cast<int>(fc);
    const Vec2 origin{scenario.bounds.x_min, scenario.bounds.y_min};

    std::vector<std::uint8_t> cells(static_cast<std::size_t>(rows) * cols, 0);
    GridMap probe(rows, cols, res, origin);
    for (const auto& obj : scenario.objects) {
        const Rect& f = obj.footprint;
        // Candidate window padded by one cell; the exact closed-square test decides.
        const int c_lo = std::max(0, static_cast<int>(std::floor((f.x_min - origin.x) / res)) - 1);
        const int c_hi = std::min(cols - 1, static_cast<int>(std::floor((f.x_max - origin.x) / res)) + 1);
        const int r_lo = std::max(0, static_cast<int>(std::floor((f.y_min - origin.y) / res)) - 1);
        const int r_hi = std::min(rows - 1, static_cast<int>(std::floor((f.y_max - origin.y) / res)) + 1);
        for (int r = r_lo; r <= r_hi; ++r) {
            for (int c = c_lo; c <= c_hi; ++c) {
                if (probe.cell_rect({r, c}).intersects(f)) cells[static_cast<std::size_t>(r) * cols + c] = 1;
            }
        }
    }
    GridMap raw(rows, cols, res, origin, 0, std::move(cells));
    return inflate(raw, options.inflation_radius);
}

GridMap inflate(const GridMap& raw, int radius) {
    if (radius < 0) throw InputError("inflation radius must be non-negative");
    const int rows = raw.rows();
    const int cols = raw.cols();
    auto src = raw.cells();
    // Separable square max-filter: along columns, then along rows.
    std::vector<std::uint8_t> horiz(src.size(), 0);
    for (int r = 0; r < rows; ++r) {
        const std::size_t base = static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) {
            if (!src[base + c]) continue;
            const int lo = std::max(0, c - radius);
            const int hi = std::min(cols - 1, c + radius);
            std::fill(horiz.begin() + static_cast<std::ptrdiff_t>(base + lo),
                      horiz.begin() + static_cast<std::ptrdiff_t>(base + hi + 1), std::uint8_t{1});
        }
    }
    std::vector<std::uint8_t> out(src.size(), 0);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (!horiz[static_cast<std::size_t>(r) * cols + c]) continue;
            const int lo = std::max(0, r - radius);
            const int hi = std::min(rows - 1, r + radius);
            for (int rr = lo; rr <= hi; ++rr) out[static_cast<std::size_t>(rr) * cols + c] = 1;
        }
    }
    return GridMap(rows, cols, raw.resolution(), raw.origin(), raw.inflation_radius_cells() + radius,
                   std::move(out));
}

std::vector<Cell> extract_obstacles(const GridMap& map) {
    std::vector<Cell> out;
    out.reserve(map.obstacle_count());
    for (int r = 0; r < map.rows(); ++r)
        for (int c = 0; c < map.cols(); ++c)
            if (map[{r, c}]) out.push_back({r, c});
    return out;
}

GridMap rasterize_obstacles(std::span<const Cell> obstacles, int rows, int cols, double resolution,
                            Vec2 origin, int inflation_radius_cells) {
    GridMap shape(rows, cols, resolution, origin);
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(rows) * cols, 0);
    for (const Cell& c : obstacles) {
        if (!shape.in_range(c))
            throw RangeError("obstacle (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                             ") outside grid");
        cells[static_cast<std::size_t>(c.row) * cols + c.col] = 1;
    }
    return GridMap(rows, cols, resolution, origin, inflation_radius_cells, std::move(cells));
}

nlohmann::json export_grid_map(const GridMap& map) {
    nlohmann::json obstacles = nlohmann::json::array();
    for (const Cell& c : extract_obstacles(map)) obstacles.push_back({c.row, c.col});
    return {{"resolution", map.resolution()},
            {"origin", {map.origin().x, map.origin().y}},
            {"rows", map.rows()},
            {"cols", map.cols()},
            {"inflation_radius", map.inflation_radius_cells()},
            {"obstacles", std::move(obstacles)}};
}

GridMap import_grid_map(const nlohmann::json& doc) {
    try {
        const auto origin = doc.at("origin");
        std::vector<Cell> obstacles;
        for (const auto& o : doc.at("obstacles")) obstacles.push_back({o.at(0).get<int>(), o.at(1).get<int>()});
        return rasterize_obstacles(obstacles, doc.at("rows").get<int>(), doc.at("cols").get<int>(),
                                   doc.at("resolution").get<double>(),
                                   {origin.at(0).get<double>(), origin.at(1).get<double>()},
                                   doc.value("inflation_radius", 0));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("grid map document: ") + e.what());
    }
}

}  // namespace llmnav::world
