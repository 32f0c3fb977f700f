#include "tlppo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "tlppo/io.hpp"

namespace tlppo {

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double paired_sign_test(const std::vector<bool>& a, const std::vector<bool>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired_sign_test: unequal sample sizes");
    int only_a = 0;
    int discordant = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
            ++discordant;
            if (a[i]) ++only_a;
        }
    }
    if (discordant == 0) return 1.0;
    // P(X >= only_a), X ~ Binomial(discordant, 1/2), summed in log space.
    double p = 0.0;
    for (int k = only_a; k <= discordant; ++k) {
        const double log_term = std::lgamma(discordant + 1.0) - std::lgamma(k + 1.0) -
                                std::lgamma(discordant - k + 1.0) - discordant * std::log(2.0);
        p += std::exp(log_term);
    }
    return std::min(1.0, p);
}

std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t episode) {
    return derive_seed(master_seed, 0x1000 + episode);
}

std::size_t default_workers() {
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::vector<EpisodeResult> run_episodes(const EpisodeConfig& base, const Arena& arena, PlannerKind kind,
                                        std::uint64_t budget, std::size_t episodes, std::size_t workers) {
    EpisodeConfig cfg = base;
    cfg.planner.kind = kind;
    cfg.planner.budget_branches = budget;
    cfg.validate();

    std::vector<EpisodeResult> results(episodes);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < episodes; i = next++) {
            EpisodeConfig local = cfg;
            local.seed = episode_seed(base.seed, i);
            results[i] = run_episode(local, arena);
        }
    };
    const std::size_t n = std::min(workers == 0 ? default_workers() : workers, std::max<std::size_t>(episodes, 1));
    if (n <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
    }
    return results;
}

SweepRecord summarize(PlannerKind kind, std::uint64_t budget, const std::vector<EpisodeResult>& results) {
    SweepRecord rec;
    rec.planner = kind;
    rec.budget_branches = budget;
    rec.episodes = results.size();
    double plan_time = 0.0;
    std::size_t plan_calls = 0;
    for (const auto& r : results) {
        switch (r.outcome) {
            case Outcome::survived: ++rec.survived; break;
            case Outcome::captured: ++rec.captured; break;
            case Outcome::censored: ++rec.censored; break;
        }
        for (const auto& row : r.trace) plan_time += row.plan_time_s;
        plan_calls += r.trace.size();
    }
    rec.survival = results.empty() ? 0.0 : survival_rate(rec.survived, rec.episodes);
    rec.survival_ci95 = wilson_interval(rec.survived, rec.episodes);
    rec.mean_plan_time_s = plan_calls ? plan_time / static_cast<double>(plan_calls) : 0.0;
    rec.time_per_branch_s = budget ? rec.mean_plan_time_s / static_cast<double>(budget) : 0.0;
    return rec;
}

namespace {

constexpr const char* kSweepHeader =
    "planner,budget_branches,episodes,survived,captured,censored,survival,ci95_low,ci95_high,mean_plan_time_s,"
    "time_per_branch_s";

void write_record(std::ostream& os, const SweepRecord& r) {
    os << to_string(r.planner) << ',' << r.budget_branches << ',' << r.episodes << ',' << r.survived << ','
       << r.captured << ',' << r.censored << ',' << std::setprecision(6) << std::fixed << r.survival << ','
       << r.survival_ci95.first << ',' << r.survival_ci95.second << ',' << std::setprecision(9) << std::scientific
       << r.mean_plan_time_s << ',' << r.time_per_branch_s << '\n';
    os.unsetf(std::ios::floatfield);
}

std::optional<SweepRecord> parse_record(const std::string& line) {
    std::vector<std::string> f;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 11) return std::nullopt;
    SweepRecord r;
    r.planner = parse_planner_kind(f[0]);
    r.budget_branches = std::stoull(f[1]);
    r.episodes = std::stoull(f[2]);
    r.survived = std::stoull(f[3]);
    r.captured = std::stoull(f[4]);
    r.censored = std::stoull(f[5]);
    r.survival = std::stod(f[6]);
    r.survival_ci95 = {std::stod(f[7]), std::stod(f[8])};
    r.mean_plan_time_s = std::stod(f[9]);
    r.time_per_branch_s = std::stod(f[10]);
    return r;
}

std::filesystem::path point_cache_file(const std::filesystem::path& dir, PlannerKind kind, std::uint64_t budget,
                                       const std::string& hash, std::size_t episodes) {
    return dir / (std::string(to_string(kind)) + "_" + std::to_string(budget) + "_" + std::to_string(episodes) + "_" +
                  hash + ".csv");
}

}  // namespace

std::vector<SweepRecord> sweep_survival(PlannerKind kind, const SweepOptions& opts, const EpisodeConfig& base,
                                        const Arena& arena) {
    if (!std::is_sorted(opts.budgets.begin(), opts.budgets.end())) {
        throw std::invalid_argument("sweep_survival: budgets must be sorted ascending");
    }
    EpisodeConfig cfg = base;
    cfg.mode = Mode::turn_based;
    cfg.planner.kind = kind;
    const std::string hash = config_hash(cfg);
    if (opts.cache_dir) std::filesystem::create_directories(*opts.cache_dir);

    std::vector<SweepRecord> out;
    for (const auto budget : opts.budgets) {
        std::optional<std::filesystem::path> cache;
        if (opts.cache_dir) cache = point_cache_file(*opts.cache_dir, kind, budget, hash, opts.episodes_per_point);
        if (cache && std::filesystem::exists(*cache)) {
            std::ifstream in(*cache);
            std::string line;
            std::optional<SweepRecord> rec;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#' || line.rfind("planner,", 0) == 0) continue;
                rec = parse_record(line);
            }
            if (rec) {
                out.push_back(*rec);
                continue;
            }
        }
        const auto results = run_episodes(cfg, arena, kind, budget, opts.episodes_per_point, opts.workers);
        auto rec = summarize(kind, budget, results);
        if (cache) {
            // Write-then-rename so an interrupted run never leaves a partial point behind.
            const auto tmp = std::filesystem::path(cache->string() + ".tmp");
            {
                std::ofstream os(tmp);
                write_metadata(os, hash, base.seed);
                os << kSweepHeader << '\n';
                write_record(os, rec);
            }
            std::filesystem::rename(tmp, *cache);
            // Reload so cached and fresh points carry the same rounding.
            std::ifstream in(*cache);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#' || line.rfind("planner,", 0) == 0) continue;
                if (auto r = parse_record(line)) rec = *r;
            }
        }
        out.push_back(rec);
    }
    return out;
}

std::vector<SweepRecord> sweep_timing(PlannerKind kind, const std::vector<std::uint64_t>& budgets, std::size_t reps,
                                      const EpisodeConfig& base, const Arena& arena) {
    if (reps == 0) throw std::invalid_argument("sweep_timing: reps must be at least 1");
    const HexGrid& grid = arena.grid;
    // Fixed mid-episode state: prey halfway along the start-to-goal route.
    const auto route = shortest_path_ids(grid, grid.start_gate(), grid.goal());
    const CellId prey = route[route.size() / 2];
    Rng belief_rng(derive_seed(base.seed, 0x7157));
    Belief belief = init_belief(grid, grid.start_gate(), base.particles, belief_rng);
    belief.condition(prey, Observation{}, grid, belief_rng);

    PlannerSettings settings = base.planner;
    settings.kind = kind;
    std::vector<SweepRecord> out;
    for (const auto budget : budgets) {
        settings.budget_branches = budget;
        auto planner = make_planner(settings, arena, derive_seed(base.seed, budget));
        double total = 0.0;
        for (std::size_t i = 0; i < reps; ++i) {
            total += planner->plan(belief, prey, {budget, std::nullopt}).elapsed_s;
        }
        SweepRecord rec;
        rec.planner = kind;
        rec.budget_branches = budget;
        rec.episodes = reps;
        rec.mean_plan_time_s = total / static_cast<double>(reps);
        rec.time_per_branch_s = rec.mean_plan_time_s / static_cast<double>(budget);
        out.push_back(rec);
    }
    return out;
}

CompareResult compare_realtime(const EpisodeConfig& base, const Arena& arena, std::size_t episodes,
                               std::size_t workers) {
    if (episodes == 0) throw std::invalid_argument("compare_realtime: at least one episode is required");
    EpisodeConfig cfg = base;
    cfg.mode = Mode::real_time;
    cfg.budget_s = real_time_budget(arena.grid.cell_spacing_m(), kMouseSpeedMps, kPlanningSafetyFraction);

    CompareResult out;
    out.budget_s = cfg.budget_s;
    out.tlppo = run_episodes(cfg, arena, PlannerKind::tlppo, kRealTimeBranchCap, episodes, workers);
    out.pomcp = run_episodes(cfg, arena, PlannerKind::pomcp, kRealTimeBranchCap, episodes, workers);
    auto row = [](const char* name, const std::vector<EpisodeResult>& rs) {
        HistogramRow h;
        h.agent = name;
        h.episodes = rs.size();
        h.survived = static_cast<std::size_t>(
            std::count_if(rs.begin(), rs.end(), [](const auto& r) { return r.outcome == Outcome::survived; }));
        h.survival = survival_rate(h.survived, h.episodes);
        h.survival_ci95 = wilson_interval(h.survived, h.episodes);
        return h;
    };
    out.rows.push_back(row("tlppo", out.tlppo));
    out.rows.push_back(row("pomcp", out.pomcp));
    HistogramRow mice;
    mice.agent = "reference_mice";
    mice.episodes = kMouseTrajectories;
    mice.survived = static_cast<std::size_t>(std::lround(kMouseSurvival * kMouseTrajectories));
    mice.survival = kMouseSurvival;
    mice.survival_ci95 = wilson_interval(mice.survived, mice.episodes);
    out.rows.push_back(mice);
    return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records, const EpisodeConfig& base,
                     std::size_t episodes_per_point) {
    write_metadata(os, config_hash(base), base.seed);
    os << "# episodes_per_point: " << episodes_per_point << '\n';
    os << kSweepHeader << '\n';
    for (const auto& r : records) write_record(os, r);
}

void write_hist_csv(std::ostream& os, const CompareResult& result, const EpisodeConfig& base) {
    write_metadata(os, config_hash(base), base.seed);
    os << "# budget_s: " << std::setprecision(6) << result.budget_s << '\n';
    os << "# branch_cap: " << kRealTimeBranchCap << '\n';
    os << "agent,episodes,survived,survival,ci95_low,ci95_high\n";
    for (const auto& r : result.rows) {
        os << r.agent << ',' << r.episodes << ',' << r.survived << ',' << std::fixed << std::setprecision(6)
           << r.survival << ',' << r.survival_ci95.first << ',' << r.survival_ci95.second << '\n';
        os.unsetf(std::ios::floatfield);
    }
}

}  // namespace tlppo
