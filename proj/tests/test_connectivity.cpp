#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "dense_eigen.hpp"
#include "test_support.hpp"
#include "tlppo/connectivity.hpp"
#include "tlppo/grid.hpp"

using namespace tlppo;
using oracle::DenseEigen;
using oracle::dense_principal;

namespace {

const char* const kShipped[] = {"arena_paper.world", "arena_tiny.world", "arena_open.world"};

WorldSpec spec_with(int radius, std::vector<HexCoord> occ, HexCoord start, HexCoord goal) {
    WorldSpec s;
    s.radius = radius;
    s.long_diagonal_m = 0.11 * (2 * radius + 1);
    s.occlusions = std::move(occ);
    s.start_gate = start;
    s.goal = goal;
    return s;
}

// Numpy-style linear percentile, written out independently.
double numpy_percentile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    const double pos = (static_cast<double>(xs.size()) - 1.0) * p / 100.0;
    const double lo = std::floor(pos);
    const double hi = std::ceil(pos);
    return xs[static_cast<std::size_t>(lo)] * (1.0 - (pos - lo)) + xs[static_cast<std::size_t>(hi)] * (pos - lo);
}

}  // namespace

TEST_CASE("power iteration agrees with dense eigen-decomposition on shipped arenas") {
    for (const char* name : kShipped) {
        CAPTURE(name);
        const HexGrid g = load_grid(test_world(name));
        const CentralityField f = eigencentrality(g);
        const DenseEigen dense = dense_principal(g);

        double max_err = 0.0;
        for (CellId c : g.free_cells()) {
            max_err = std::max(max_err, std::abs(f.values[static_cast<std::size_t>(c)] - dense.vector.at(g.coord(c))));
        }
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            if (g.is_occluded(static_cast<CellId>(i))) CHECK(f.values[i] == 0.0);
        }
        CHECK(max_err < 1e-6);
        CHECK(f.eigenvalue == doctest::Approx(dense.value).epsilon(1e-9));

        // Rayleigh residual ||Av - lambda v||.
        double res_sq = 0.0;
        double norm_sq = 0.0;
        for (CellId c : g.free_cells()) {
            double av = 0.0;
            for (CellId nb : g.free_neighbors(c)) av += f.values[static_cast<std::size_t>(nb)];
            const double v = f.values[static_cast<std::size_t>(c)];
            res_sq += (av - f.eigenvalue * v) * (av - f.eigenvalue * v);
            norm_sq += v * v;
            CHECK(v >= 0.0);
        }
        CHECK(std::sqrt(res_sq) < 1e-8);
        CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("three mutually adjacent cells share centrality 1/sqrt(3)") {
    const HexGrid g = build_grid(spec_with(1, {{0, -1}, {-1, 0}, {-1, 1}, {0, 1}}, {0, 0}, {1, -1}));
    REQUIRE(g.free_count() == 3);
    const CentralityField f = eigencentrality(g);
    for (CellId c : g.free_cells()) CHECK(f.values[static_cast<std::size_t>(c)] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(f.eigenvalue == doctest::Approx(2.0));
}

TEST_CASE("a single free cell gets centrality 1 and is its own LPPO") {
    const HexGrid g = build_grid(spec_with(1, {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}, {0, 0}, {0, 0}));
    const LppoAnalysis a = analyze_connectivity(g);
    const auto only = static_cast<std::size_t>(g.id({0, 0}));
    CHECK(a.centrality.values[only] == 1.0);
    // Every neighbor counts as zero, so each factor is |0 - 1|.
    CHECK(a.dprod.values[only] == 1.0);
    CHECK_FALSE(a.lppo.all_zero);
    CHECK(a.lppo.locations == std::vector<CellId>{g.id({0, 0})});
}

TEST_CASE("centrality is invariant under a half-turn of the arena") {
    WorldSpec s = load_world_spec(test_world("arena_paper.world"));
    WorldSpec t = s;
    auto flip = [](HexCoord c) { return HexCoord{-c.q, -c.r}; };
    for (auto& c : t.occlusions) c = flip(c);
    for (auto& c : t.excluded) c = flip(c);
    t.start_gate = flip(s.start_gate);
    t.goal = flip(s.goal);
    const HexGrid a = build_grid(s);
    const HexGrid b = build_grid(t);
    const CentralityField fa = eigencentrality(a);
    const CentralityField fb = eigencentrality(b);
    for (CellId c : a.free_cells()) {
        const CellId m = b.id(flip(a.coord(c)));
        CHECK(fa.values[static_cast<std::size_t>(c)] == doctest::Approx(fb.values[static_cast<std::size_t>(m)]).epsilon(1e-9));
    }
}

TEST_CASE("power iteration reports non-convergence") {
    const HexGrid g = load_grid(test_world("arena_paper.world"));
    PowerIterationOptions opts;
    opts.max_iterations = 3;
    CHECK_THROWS_AS(eigencentrality(g, opts), NumericError);
}

TEST_CASE("derivative product matches a coordinate-level recomputation") {
    for (const char* name : kShipped) {
        CAPTURE(name);
        const HexGrid g = load_grid(test_world(name));
        const CentralityField f = eigencentrality(g);
        const DerivativeProductField d = derivative_product(f, g);
        std::map<HexCoord, double> ec;
        for (CellId c : g.free_cells()) ec[g.coord(c)] = f.values[static_cast<std::size_t>(c)];
        const HexCoord offsets[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            const HexCoord c = g.coord(static_cast<CellId>(i));
            if (!ec.count(c)) {
                CHECK(d.values[i] == 0.0);
                continue;
            }
            double expect = 1.0;
            for (HexCoord o : offsets) {
                const auto it = ec.find(c + o);
                expect *= std::abs((it == ec.end() ? 0.0 : it->second) - ec[c]);
            }
            CHECK(d.values[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("percentile interpolation follows the linear rule") {
    CHECK(percentile_of({1, 2, 3, 4}, 50) == doctest::Approx(2.5));
    CHECK(percentile_of({10}, 95) == 10.0);
    CHECK(percentile_of({0, 10}, 95) == doctest::Approx(9.5));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> xs(1 + trial * 3);
        for (auto& x : xs) x = u(rng);
        for (double p : {1.0, 25.0, 50.0, 95.0, 99.9}) CHECK(percentile_of(xs, p) == doctest::Approx(numpy_percentile(xs, p)));
    }
}

TEST_CASE("LPPO sets shrink as the percentile rises and hit the extremes") {
    const HexGrid g = load_grid(test_world("arena_paper.world"));
    const CentralityField f = eigencentrality(g);
    const DerivativeProductField d = derivative_product(f, g);
    std::size_t positive = 0;
    double max_v = 0.0;
    for (double v : d.values) {
        positive += v > 0.0;
        max_v = std::max(max_v, v);
    }
    REQUIRE(positive > 10);

    std::vector<CellId> prev;
    bool first = true;
    for (double p = 1.0; p < 100.0; p += 7.0) {
        const LppoSet s = extract_lppo(d, p);
        CHECK(std::is_sorted(s.locations.begin(), s.locations.end()));
        if (!first) CHECK(std::includes(prev.begin(), prev.end(), s.locations.begin(), s.locations.end()));
        for (CellId c : s.locations) CHECK(d.values[static_cast<std::size_t>(c)] >= s.threshold);
        prev = s.locations;
        first = false;
    }
    double min_v = max_v;
    for (double v : d.values) {
        if (v > 0.0) min_v = std::min(min_v, v);
    }
    CHECK(extract_lppo(d, 1e-9).threshold == doctest::Approx(min_v).epsilon(1e-6));
    CHECK(extract_lppo_at(d, min_v).locations.size() == positive);
    const LppoSet top = extract_lppo(d, 100.0 - 1e-12);
    REQUIRE(top.locations.size() >= 1);
    for (CellId c : top.locations) CHECK(d.values[static_cast<std::size_t>(c)] == doctest::Approx(max_v));

    CHECK_THROWS_AS(extract_lppo(d, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(extract_lppo(d, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(extract_lppo(d, -3.0), std::invalid_argument);

    DerivativeProductField zeros;
    zeros.values.assign(10, 0.0);
    CHECK(extract_lppo(zeros, 95.0).all_zero);
}

TEST_CASE("analysis CSV and PGM maps describe every cell") {
    const HexGrid g = load_grid(test_world("arena_tiny.world"));
    const LppoAnalysis a = analyze_connectivity(g);

    std::ostringstream csv;
    write_analysis_csv(csv, g, a);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "coord,ec,dprod,is_lppo");
    std::size_t rows = 0;
    std::size_t lppo_rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int q = 0;
        int r = 0;
        char comma = 0;
        double ec = 0;
        double dp = 0;
        int flag = 0;
        ls >> q >> r >> comma >> ec >> comma >> dp >> comma >> flag;
        REQUIRE(ls);
        const CellId id = g.id({q, r});
        CHECK(ec == doctest::Approx(a.centrality.values[static_cast<std::size_t>(id)]).epsilon(1e-15));
        CHECK(flag == (a.lppo.contains(id) ? 1 : 0));
        lppo_rows += static_cast<std::size_t>(flag);
        ++rows;
    }
    CHECK(rows == g.cell_count());
    CHECK(lppo_rows == a.lppo.locations.size());

    std::ostringstream pgm;
    write_map_pgm(pgm, g, a, MapLayer::lppo);
    std::istringstream pin(pgm.str());
    std::string magic;
    int w = 0;
    int h = 0;
    int maxval = 0;
    pin >> magic >> w >> h >> maxval;
    CHECK(magic == "P2");
    CHECK(w == 2 * g.radius() + 1);
    CHECK(h == w);
    CHECK(maxval == 255);
    std::map<int, int> counts;
    for (int i = 0; i < w * h; ++i) {
        int px = -1;
        pin >> px;
        REQUIRE(pin);
        ++counts[px];
    }
    CHECK(counts[255] == static_cast<int>(a.lppo.locations.size()));
    CHECK(counts[64] == static_cast<int>(g.occlusions().size()));
    CHECK(counts[160] + counts[255] == static_cast<int>(g.free_count()));
}
