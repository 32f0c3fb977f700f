#include <doctest.h>

#include <cmath>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "test_support.hpp"
#include "tlppo/episode.hpp"

using namespace tlppo;
using namespace tlppo::oracle;

namespace {

EpisodeConfig paper_config(std::uint64_t seed, PlannerKind kind = PlannerKind::tlppo, std::uint64_t budget = 30) {
    EpisodeConfig cfg;
    cfg.world = test_world("arena_paper.world").string();
    cfg.seed = seed;
    cfg.planner.kind = kind;
    cfg.planner.budget_branches = budget;
    cfg.particles = 200;
    return cfg;
}

// Takes longer than any sensible move budget, then suggests a legal move.
class SlowPlanner final : public Planner {
public:
    explicit SlowPlanner(std::chrono::milliseconds delay) : delay_(delay) {}
    PlanResult plan(const Belief&, CellId, const PlanLimits&) override {
        const auto start = Clock::now();
        std::this_thread::sleep_for(delay_);
        ++total_branches_;
        return {Move::d0, 1, std::chrono::duration<double>(Clock::now() - start).count()};
    }
    std::string_view name() const override { return "slow"; }

private:
    std::chrono::milliseconds delay_;
};

}  // namespace

TEST_CASE("capture fires exactly below 2.5 cells of center distance") {
    const HexGrid g = load_grid(test_world("arena_paper.world"));
    std::size_t captures = 0;
    for (CellId a : g.free_cells()) {
        for (CellId b : g.free_cells()) {
            const double d = center_distance(g.coord(a), g.coord(b));
            const bool expect = d < 2.5;
            CHECK(is_capture(g, a, b) == expect);
            captures += expect;
            const int h = hex_distance(g.coord(a), g.coord(b));
            if (h <= 2) CHECK(is_capture(g, a, b));
            if (h >= 3) CHECK_FALSE(is_capture(g, a, b));
        }
    }
    CHECK(captures > g.free_count());
    // Nearest non-capturing separation on the lattice is sqrt(7) cells.
    CHECK(center_distance({0, 0}, {2, 1}) == doctest::Approx(std::sqrt(7.0)));
    CHECK(distance_m(g, {0, 0}, {2, 1}) == doctest::Approx(std::sqrt(7.0) * 0.11));
}

TEST_CASE("tick order: prey move, capture, goal, predator move, capture") {
    const HexGrid g = load_grid(test_world("arena_open.world"));
    const CellId goal = g.goal();
    Rng rng(1);
    SUBCASE("reaching the goal ends the tick before the predator moves") {
        // Predator three cells from the goal, so one more step would capture.
        const CellId before = g.id({9, -5});
        const PredatorState pred{g.id({7, -5}), kNoCell, kNoCell};
        JointState s{before, pred};
        REQUIRE_FALSE(is_capture(g, goal, pred.position));
        CHECK(advance_tick(g, s, goal, rng) == Status::reached_goal);
        CHECK(s.predator.position == pred.position);
    }
    SUBCASE("capture on arrival beats the goal") {
        const PredatorState pred{g.id({8, -4}), kNoCell, kNoCell};
        JointState s{g.id({9, -5}), pred};
        REQUIRE(is_capture(g, goal, pred.position));
        CHECK(advance_tick(g, s, goal, rng) == Status::captured);
    }
    SUBCASE("the predator's own step can capture") {
        JointState s{g.id({0, 0}), {g.id({4, 0}), kNoCell, kNoCell}};
        CHECK(advance_tick(g, s, g.id({0, 0}), rng) == Status::running);
        CHECK(hex_distance(g.coord(s.predator.position), {0, 0}) == 3);
        CHECK(advance_tick(g, s, g.id({0, 0}), rng) == Status::captured);
    }
}

TEST_CASE("episodes are deterministic and replay hash-identically") {
    const auto cfg0 = paper_config(0);
    const auto arena = load_arena(cfg0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        CAPTURE(seed);
        EpisodeConfig cfg = paper_config(seed, seed % 2 ? PlannerKind::pomcp : PlannerKind::tlppo, 20);
        const EpisodeResult r = run_episode(cfg, *arena);
        CHECK(r.ticks == static_cast<int>(r.trace.size()));
        std::stringstream file;
        write_trace_csv(file, cfg, r);
        const ParsedTrace parsed = read_trace_csv(file);
        CHECK(parsed.recorded_hash == r.trace_hash());
        CHECK(parsed.result.trace_hash() == r.trace_hash());
        const ReplayReport rep = replay_trace(parsed);
        CHECK_MESSAGE(rep.ok, rep.message);
    }
}

TEST_CASE("trace rows follow the movement rules") {
    const auto cfg0 = paper_config(0);
    const auto arena = load_arena(cfg0);
    const HexGrid& g = arena->grid;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const EpisodeResult r = run_episode(paper_config(seed), *arena);
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            const auto& row = r.trace[i];
            CHECK(row.tick == static_cast<int>(i));
            CHECK(row.seen.has_value() == g.visible(g.id(row.prey), g.id(row.predator)));
            const HexCoord next_prey = i + 1 < r.trace.size() ? r.trace[i + 1].prey : r.final_prey;
            const HexCoord next_pred = i + 1 < r.trace.size() ? r.trace[i + 1].predator : r.final_predator;
            CHECK(g.coord(g.apply(g.id(row.prey), row.action)) == next_prey);
            CHECK(hex_distance(row.predator, next_pred) <= 1);
        }
        if (r.outcome == Outcome::survived) CHECK(r.final_prey == g.coord(g.goal()));
        if (r.outcome == Outcome::captured) CHECK(is_capture(g, g.id(r.final_prey), g.id(r.final_predator)));
    }
}

TEST_CASE("a predator starting within reach captures at tick zero") {
    EpisodeConfig cfg = paper_config(3);
    cfg.predator_start = HexCoord{-9, 5};
    const EpisodeResult r = run_episode(cfg);
    CHECK(r.outcome == Outcome::captured);
    CHECK(r.ticks == 0);
    CHECK(r.trace.empty());
}

TEST_CASE("a tick limit censors the episode") {
    EpisodeConfig cfg = paper_config(4);
    cfg.max_ticks = 2;
    const EpisodeResult r = run_episode(cfg);
    if (r.outcome == Outcome::censored) CHECK(r.ticks == 2);
    CHECK(r.ticks <= 2);
}

TEST_CASE("real-time overruns forfeit the move") {
    EpisodeConfig cfg = paper_config(5);
    cfg.mode = Mode::real_time;
    cfg.budget_s = 0.001;
    cfg.max_ticks = 8;
    const auto arena = load_arena(cfg);
    SlowPlanner slow(std::chrono::milliseconds(5));
    const EpisodeResult r = run_episode(cfg, *arena, slow);
    REQUIRE_FALSE(r.trace.empty());
    CHECK(r.overruns == r.trace.size());
    for (const auto& row : r.trace) {
        CHECK(row.overrun);
        CHECK(row.action == Move::stay);
        CHECK(row.prey == r.trace.front().prey);
    }
    std::stringstream file;
    write_trace_csv(file, cfg, r);
    CHECK_FALSE(replay_trace(read_trace_csv(file)).ok);
}

TEST_CASE("real-time planners respect the wall-clock budget") {
    EpisodeConfig cfg = paper_config(6, PlannerKind::pomcp, kRealTimeBranchCap);
    cfg.mode = Mode::real_time;
    cfg.budget_s = real_time_budget(0.11, kMouseSpeedMps, kPlanningSafetyFraction);
    cfg.max_ticks = 20;
    const EpisodeResult r = run_episode(cfg);
    for (const auto& row : r.trace) CHECK(row.branches <= kRealTimeBranchCap);
}

TEST_CASE("survival arithmetic") {
    CHECK(survival_rate(198, 230) == doctest::Approx(0.8609).epsilon(1e-4 / 0.8609));
    CHECK(std::abs(survival_rate(198, 230) - 0.8609) < 1e-4);
    CHECK_THROWS_AS(survival_rate(0, 0), std::invalid_argument);

    std::vector<EpisodeResult> list(230);
    for (std::size_t i = 0; i < list.size(); ++i) {
        list[i].outcome = i < 198 ? Outcome::survived : (i % 2 ? Outcome::captured : Outcome::censored);
    }
    CHECK(std::abs(survival_rate(list) - 0.8609) < 1e-4);
}

TEST_CASE("real-time move budget") {
    const double full = real_time_budget(0.11, 0.76, 1.0);
    CHECK(full >= 0.144);
    CHECK(full <= 0.146);
    const double planned = real_time_budget(0.11, 0.76, 0.75);
    CHECK(planned >= 0.108);
    CHECK(planned <= 0.110);
    CHECK(planned == doctest::Approx(full * 0.75));
    CHECK_THROWS_AS(real_time_budget(0.0, 0.76, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(real_time_budget(0.11, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("episode config JSON") {
    SUBCASE("round trip through the canonical form") {
        EpisodeConfig cfg = paper_config(42, PlannerKind::pomcp, 777);
        cfg.planner.rewards.step_reward = -0.01;
        cfg.prey_start = HexCoord{-9, 5};
        cfg.mode = Mode::real_time;
        cfg.budget_s = 0.1;
        const std::string text = episode_config_to_json(cfg);
        const EpisodeConfig back = episode_config_from_json(text);
        CHECK(episode_config_to_json(back) == text);
        CHECK(config_hash(back) == config_hash(cfg));
        cfg.seed = 43;
        CHECK(config_hash(back) != config_hash(cfg));
    }
    SUBCASE("unknown keys are rejected at every level") {
        CHECK_THROWS_AS(episode_config_from_json(R"({"world": "x", "sede": 1})"), ConfigError);
        CHECK_THROWS_AS(episode_config_from_json(R"({"planner": {"budget": 10}})"), ConfigError);
        CHECK_THROWS_AS(episode_config_from_json(R"({"planner": {"kind": "dqn"}})"), ConfigError);
        CHECK_THROWS_AS(episode_config_from_json(R"({"mode": "fast"})"), ConfigError);
        CHECK_THROWS_AS(episode_config_from_json("[1, 2]"), ConfigError);
        CHECK_THROWS_AS(episode_config_from_json("{"), ConfigError);
    }
    SUBCASE("invalid combinations fail validation") {
        EpisodeConfig cfg = paper_config(1);
        CHECK_NOTHROW(cfg.validate());
        cfg.mode = Mode::real_time;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = paper_config(1);
        cfg.planner.percentile = 100.0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = paper_config(1);
        cfg.planner.budget_branches = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = paper_config(1);
        cfg.planner.rewards.capture_reward = 0.5;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_CASE("trace files carry metadata and reject tampering") {
    EpisodeConfig cfg = paper_config(9);
    const EpisodeResult r = run_episode(cfg);
    std::stringstream file;
    write_trace_csv(file, cfg, r);
    const std::string text = file.str();
    CHECK(text.find("# config_hash: " + config_hash(cfg)) != std::string::npos);
    CHECK(text.find("# master_seed: 9") != std::string::npos);

    const ParsedTrace parsed = read_trace_csv(file);
    REQUIRE(parsed.result.trace.size() == r.trace.size());
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        CHECK(parsed.result.trace[i].prey == r.trace[i].prey);
        CHECK(parsed.result.trace[i].predator == r.trace[i].predator);
        CHECK(parsed.result.trace[i].seen == r.trace[i].seen);
        CHECK(parsed.result.trace[i].action == r.trace[i].action);
        CHECK(parsed.result.trace[i].branches == r.trace[i].branches);
    }
    CHECK(parsed.result.outcome == r.outcome);

    ParsedTrace forged = parsed;
    REQUIRE_FALSE(forged.result.trace.empty());
    forged.result.trace.back().branches += 1;
    CHECK_FALSE(replay_trace(forged).ok);
    forged.recorded_hash = forged.result.trace_hash();
    CHECK_FALSE(replay_trace(forged).ok);

    std::istringstream no_config("tick,prey_q\n");
    CHECK_THROWS_AS(read_trace_csv(no_config), ConfigError);
}
