#include <llmnav/controller.hpp>
#include <llmnav/planner.hpp>
#include <llmnav/simulator.hpp>
#include <llmnav/toolproto.hpp>
#include <llmnav/worldmodel.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace llmnav;

namespace {

const world::Scenario& living_room() {
    static const auto sc = world::load_scenario_file(std::string(LLMNAV_DATA_DIR) + "/scenarios/living_room.json");
    return sc;
}

world::GridMap random_grid(int n, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution occupied(density);
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(n) * n);
    for (auto& c : cells) c = occupied(rng);
    cells.front() = cells.back() = 0;
    return world::GridMap(n, n, 0.05, {0, 0}, 0, std::move(cells));
}

}  // namespace

static void BM_CreateGridMap(benchmark::State& state) {
    const world::GridOptions opts{0.05, static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(world::create_grid_map(living_room(), opts));
}
BENCHMARK(BM_CreateGridMap)->Arg(0)->Arg(4)->Arg(6);

static void BM_AStarRandom(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto map = random_grid(n, 0.2, 1);
    for (auto _ : state) benchmark::DoNotOptimize(planner::a_star({0, 0}, {n - 1, n - 1}, map));
}
BENCHMARK(BM_AStarRandom)->Arg(20)->Arg(100)->Arg(200);

static void BM_PlanLivingRoom(benchmark::State& state) {
    const auto map = world::create_grid_map(living_room(), {0.05, 6});
    for (auto _ : state) benchmark::DoNotOptimize(planner::plan_global_path({0.8, 2.0}, {7.4, 5.3}, map));
}
BENCHMARK(BM_PlanLivingRoom);

static void BM_ParseToolCall(benchmark::State& state) {
    const std::string text =
        "<thinking>The map exists, so plan next.</thinking>\n"
        "<plan_global_path><goal_x>6.4</goal_x><goal_y>1.6</goal_y></plan_global_path>";
    for (auto _ : state) benchmark::DoNotOptimize(tools::parse_tool_call(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseToolCall);

static void BM_MotionControlEpisode(benchmark::State& state) {
    const auto map = world::create_grid_map(living_room(), {0.05, 6});
    const auto plan = planner::plan_global_path({0.8, 2.0}, {6.4, 1.6}, map);
    for (auto _ : state) {
        sim::Simulator sim(living_room(), {}, {{0.8, 2.0}, 0.0});
        benchmark::DoNotOptimize(control::motion_control(plan.waypoints, sim));
    }
}
BENCHMARK(BM_MotionControlEpisode)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
