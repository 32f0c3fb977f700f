#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "oracles.hpp"
#include "test_support.hpp"
#include "tlppo/predator.hpp"

using namespace tlppo;
using namespace tlppo::oracle;

TEST_CASE("spawn cells are free, hidden from the entry and in the furthest third") {
    for (const char* name : {"arena_paper.world", "arena_tiny.world"}) {
        CAPTURE(name);
        const HexGrid g = load_grid(test_world(name));
        const auto third = furthest_third(g);
        const auto candidates = spawn_candidates(g, g.start_gate());
        REQUIRE_FALSE(candidates.empty());

        std::set<CellId> expected;
        for (CellId c : third) {
            if (!g.visible(g.start_gate(), c)) expected.insert(c);
        }
        CHECK(std::set<CellId>(candidates.begin(), candidates.end()) == expected);

        Rng rng(11);
        std::map<CellId, int> counts;
        const int draws = 1000;
        for (int i = 0; i < draws; ++i) {
            const CellId c = spawn_cell(g, g.start_gate(), rng);
            CHECK(g.is_free(c));
            CHECK_FALSE(g.visible(g.start_gate(), c));
            CHECK(third.count(c) == 1);
            ++counts[c];
        }
        // Uniform over the candidates: chi-square well inside the 99.9% tail.
        const double e = static_cast<double>(draws) / static_cast<double>(candidates.size());
        double chi2 = 0.0;
        for (CellId c : candidates) chi2 += (counts[c] - e) * (counts[c] - e) / e;
        const double dof = static_cast<double>(candidates.size() - 1);
        CHECK(chi2 < dof + 4.5 * std::sqrt(2.0 * dof) + 10.0);
    }
}

TEST_CASE("a lone hidden far cell is always the spawn") {
    // Scan random small worlds for one whose spawn set is a single cell.
    Rng gen(17);
    std::optional<HexGrid> found;
    for (int attempt = 0; attempt < 5000 && !found; ++attempt) {
        WorldSpec s;
        s.radius = 3;
        s.long_diagonal_m = 0.77;
        s.start_gate = {-3, 0};
        s.goal = {3, 0};
        for (int q = -3; q <= 3; ++q) {
            for (int r = -3; r <= 3; ++r) {
                const HexCoord c{q, r};
                if (hex_distance(c, {0, 0}) > 3 || c == s.start_gate || c == s.goal) continue;
                if (uniform_index(gen, 100) < 30) s.occlusions.push_back(c);
            }
        }
        try {
            HexGrid g = build_grid(s);
            if (spawn_candidates(g, g.start_gate()).size() == 1) found.emplace(std::move(g));
        } catch (const WorldError&) {
        }
    }
    REQUIRE(found);
    const HexGrid& g = *found;
    const CellId only = spawn_candidates(g, g.start_gate()).front();
    Rng rng(3);
    for (int i = 0; i < 200; ++i) CHECK(spawn_cell(g, g.start_gate(), rng) == only);
}

TEST_CASE("an open arena has nowhere to hide the predator") {
    const HexGrid g = load_grid(test_world("arena_open.world"));
    Rng rng(1);
    CHECK(spawn_candidates(g, g.start_gate()).empty());
    CHECK_THROWS_AS(spawn_cell(g, g.start_gate(), rng), SpawnError);
}

TEST_CASE("the predator moves at most one cell per tick and exactly one when en route") {
    const HexGrid g = load_grid(test_world("arena_paper.world"));
    Rng rng(5);
    const auto free = g.free_cells();
    for (int episode = 0; episode < 50; ++episode) {
        PredatorState s{spawn_cell(g, g.start_gate(), rng), kNoCell, kNoCell};
        CellId prey = free[uniform_index(rng, free.size())];
        for (int t = 0; t < 200; ++t) {
            if (t % 7 == 0) prey = free[uniform_index(rng, free.size())];
            const PredatorState next = predator_step(s, prey, g, rng);
            REQUIRE(g.is_free(next.position));
            const int step = hex_distance(g.coord(s.position), g.coord(next.position));
            CHECK(step <= 1);
            // Either it walked one cell, or it was already where it wanted to be.
            if (step == 0) CHECK(next.destination == next.position);
            if (g.visible(s.position, prey)) {
                CHECK(next.last_seen_prey == prey);
                CHECK(next.destination == prey);
            }
            if (!g.visible(s.position, prey) && !s.has_path()) {
                // A fresh patrol target is hidden from where the predator stood.
                CHECK_FALSE(g.visible(s.position, next.destination));
            }
            s = next;
        }
    }
}

TEST_CASE("a visible stationary prey is approached one hop per tick") {
    const HexGrid g = load_grid(test_world("arena_open.world"));
    Rng rng(9);
    const CellId prey = g.id({-5, 0});
    PredatorState s{g.id({7, -2}), kNoCell, kNoCell};
    auto h = g.hops(s.position, prey);
    while (h > 0) {
        s = predator_step(s, prey, g, rng);
        CHECK(g.hops(s.position, prey) == h - 1);
        h = g.hops(s.position, prey);
    }
    CHECK(s.position == prey);
}

TEST_CASE("an unseen predator walks its committed route cell by cell") {
    const HexGrid g = load_grid(test_world("arena_paper.world"));
    Rng rng(21);
    // Prey parked where the predator cannot see it for the whole patrol.
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const CellId start = spawn_cell(g, g.start_gate(), rng);
        const CellId prey = g.start_gate();
        PredatorState s{start, kNoCell, kNoCell};
        s = predator_step(s, prey, g, rng);
        std::vector<CellId> route = pending_path(s, g);
        for (CellId expect : route) {
            if (g.visible(s.position, prey)) break;
            s = predator_step(s, prey, g, rng);
            CHECK(s.position == expect);
            ++checked;
        }
    }
    CHECK(checked > 30);
}

TEST_CASE("pending path is a shortest route to the destination") {
    const HexGrid g = load_grid(test_world("arena_paper.world"));
    Rng rng(2);
    const auto free = g.free_cells();
    for (int i = 0; i < 300; ++i) {
        PredatorState s{free[uniform_index(rng, free.size())], free[uniform_index(rng, free.size())], kNoCell};
        const auto path = pending_path(s, g);
        if (!s.has_path()) {
            CHECK(path.empty());
            continue;
        }
        CHECK(path.size() == g.hops(s.position, s.destination));
        CHECK(path.back() == s.destination);
        CellId prev = s.position;
        for (CellId c : path) {
            CHECK(g.hops(prev, c) == 1);
            prev = c;
        }
    }
}
