#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tlppo/bench.hpp"
#include "tlppo/connectivity.hpp"
#include "tlppo/episode.hpp"
#include "tlppo/io.hpp"

namespace fs = std::filesystem;
using namespace tlppo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// Raised for bad flags or inputs the user can fix.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::string world;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::string> planner;
    std::optional<std::uint64_t> budget;
    std::optional<double> percentile;
    std::size_t episodes = 0;
    std::size_t workers = 0;
    int verbosity = 0;
};

fs::path output_root(const CommonFlags& f) {
    if (!f.out.empty()) return f.out;
    if (const char* env = std::getenv("LPPO_OUT_DIR"); env && *env) return env;
    return "out";
}

EpisodeConfig build_config(const CommonFlags& f) {
    EpisodeConfig cfg;
    if (!f.config.empty()) cfg = load_episode_config(f.config);
    if (!f.world.empty()) cfg.world = f.world;
    if (cfg.world.empty()) throw UsageError("a world file is required (--world or \"world\" in --config)");
    if (f.seed) cfg.seed = *f.seed;
    if (f.mode) cfg.mode = parse_mode(*f.mode);
    if (f.planner) cfg.planner.kind = parse_planner_kind(*f.planner);
    if (f.budget) cfg.planner.budget_branches = *f.budget;
    if (f.percentile) cfg.planner.percentile = *f.percentile;
    return cfg;
}

std::ofstream open_output(const fs::path& file) {
    fs::create_directories(file.parent_path());
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    return os;
}

/// Loads the arena, fills in the real-time move budget from its cell spacing, then validates.
std::shared_ptr<const Arena> arena_for(EpisodeConfig& cfg) {
    auto arena = load_arena(cfg);
    if (cfg.mode == Mode::real_time && cfg.budget_s <= 0.0) {
        cfg.budget_s = real_time_budget(arena->grid.cell_spacing_m(), kMouseSpeedMps, kPlanningSafetyFraction);
    }
    cfg.validate();
    return arena;
}

int cmd_analyze(const CommonFlags& f) {
    if (f.world.empty()) throw UsageError("analyze requires --world");
    const double percentile = f.percentile.value_or(kDefaultLppoPercentile);
    if (!(percentile > 0.0 && percentile < 100.0)) {
        throw UsageError("--percentile must lie strictly between 0 and 100, got " + std::to_string(percentile));
    }
    const HexGrid grid = load_grid(f.world);
    const LppoAnalysis a = analyze_connectivity(grid, percentile);

    EpisodeConfig cfg;
    cfg.world = f.world;
    cfg.planner.percentile = percentile;
    cfg.seed = f.seed.value_or(0);
    const std::string hash = config_hash(cfg);
    const fs::path root = output_root(f);

    {
        auto os = open_output(root / "analysis.csv");
        write_metadata(os, hash, cfg.seed);
        write_analysis_csv(os, grid, a);
    }
    const std::pair<const char*, MapLayer> layers[] = {
        {"map_centrality.pgm", MapLayer::centrality},
        {"map_dprod.pgm", MapLayer::dprod},
        {"map_lppo.pgm", MapLayer::lppo},
    };
    for (const auto& [name, layer] : layers) {
        auto os = open_output(root / name);
        // PGM comments must follow the magic number, so the metadata goes second.
        std::ostringstream body;
        write_map_pgm(body, grid, a, layer);
        const std::string text = body.str();
        const auto eol = text.find('\n');
        os << text.substr(0, eol + 1);
        write_metadata(os, hash, cfg.seed);
        os << text.substr(eol + 1);
    }
    std::cout << "free cells: " << grid.free_cells().size() << ", LPPO cells: " << a.lppo.locations.size()
              << ", threshold: " << a.lppo.threshold << ", eigenvalue: " << a.centrality.eigenvalue << '\n'
              << "wrote " << (root / "analysis.csv").string() << " and map_*.pgm\n";
    return kExitOk;
}

int cmd_run(const CommonFlags& f) {
    EpisodeConfig cfg = build_config(f);
    auto arena = arena_for(cfg);
    const EpisodeResult result = run_episode(cfg, *arena);
    const fs::path file = output_root(f) / "episodes" / ("episode_" + std::to_string(cfg.seed) + ".csv");
    {
        auto os = open_output(file);
        write_trace_csv(os, cfg, result);
    }
    std::cout << to_string(result.outcome) << " after " << result.ticks << " ticks"
              << " (overruns " << result.overruns << ", depletions " << result.depletions << ")\n"
              << "trace: " << file.string() << '\n';
    return kExitOk;
}

std::vector<std::uint64_t> default_budgets(PlannerKind kind) {
    std::vector<std::uint64_t> b{1, 3, 10, 30, 100, 300, 1000, 3000, 10000};
    if (kind == PlannerKind::pomcp) b.insert(b.end(), {30000, 100000, 175000});
    return b;
}

int cmd_sweep(const CommonFlags& f, std::vector<std::uint64_t> budgets, std::size_t timing_reps) {
    EpisodeConfig cfg = build_config(f);
    cfg.mode = Mode::turn_based;
    auto arena = arena_for(cfg);
    const PlannerKind kind = cfg.planner.kind;
    if (budgets.empty()) budgets = f.budget ? std::vector<std::uint64_t>{*f.budget} : default_budgets(kind);
    std::sort(budgets.begin(), budgets.end());

    const fs::path root = output_root(f);
    SweepOptions opts;
    opts.budgets = budgets;
    opts.episodes_per_point = f.episodes ? f.episodes : 200;
    opts.workers = f.workers;
    opts.cache_dir = root / "cache";
    const auto records = sweep_survival(kind, opts, cfg, *arena);
    {
        auto os = open_output(root / ("sweep_" + std::string(to_string(kind)) + ".csv"));
        write_sweep_csv(os, records, cfg, opts.episodes_per_point);
    }
    for (const auto& r : records) {
        std::cout << to_string(kind) << " budget " << r.budget_branches << ": survival " << r.survival << " ["
                  << r.survival_ci95.first << ", " << r.survival_ci95.second << "]\n";
    }
    if (timing_reps > 0) {
        const auto timing = sweep_timing(kind, budgets, timing_reps, cfg, *arena);
        auto os = open_output(root / ("timing_" + std::string(to_string(kind)) + ".csv"));
        write_sweep_csv(os, timing, cfg, timing_reps);
    }
    return kExitOk;
}

int cmd_compare(const CommonFlags& f) {
    EpisodeConfig cfg = build_config(f);
    cfg.mode = Mode::real_time;
    auto arena = arena_for(cfg);
    const std::size_t episodes = f.episodes ? f.episodes : 100;
    const CompareResult result = compare_realtime(cfg, *arena, episodes, f.workers);
    {
        auto os = open_output(output_root(f) / "hist.csv");
        write_hist_csv(os, result, cfg);
    }
    for (const auto& row : result.rows) {
        std::cout << row.agent << ": " << row.survived << "/" << row.episodes << " = " << row.survival << '\n';
    }
    return kExitOk;
}

int cmd_replay(const std::string& trace_file) {
    std::ifstream in(trace_file);
    if (!in) throw UsageError("cannot open trace " + trace_file);
    const ParsedTrace trace = read_trace_csv(in);
    const ReplayReport report = replay_trace(trace);
    std::cout << report.message << '\n';
    return report.ok ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Predator-evasion planning on hexagonal arenas"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    CommonFlags flags;
    std::vector<std::uint64_t> budgets;
    std::size_t timing_reps = 0;
    std::string trace_file;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--world", flags.world, "World file");
        sub->add_option("--config", flags.config, "Episode config JSON");
        sub->add_option("--out", flags.out, "Output directory (default $LPPO_OUT_DIR or ./out)");
        sub->add_option("--seed", flags.seed, "Master seed");
        sub->add_option("--mode", flags.mode, "turn or real")->check(CLI::IsMember({"turn", "real"}));
        sub->add_option("--planner", flags.planner, "pomcp or tlppo")->check(CLI::IsMember({"pomcp", "tlppo"}));
        sub->add_option("--budget", flags.budget, "Branches per plan call")->check(CLI::PositiveNumber);
        sub->add_option("--episodes", flags.episodes, "Episodes per point");
        sub->add_option("--workers", flags.workers, "Worker threads (0 = all cores)");
        sub->add_option("--percentile", flags.percentile, "LPPO percentile in (0, 100)");
        sub->add_flag("-v,--verbose", flags.verbosity, "More output");
    };

    auto* analyze = app.add_subcommand("analyze", "Eigencentrality and LPPO maps for a world");
    add_common(analyze);
    auto* run = app.add_subcommand("run", "Run one episode and write its trace");
    add_common(run);
    auto* sweep = app.add_subcommand("sweep", "Survival (and optionally timing) versus branch budget");
    add_common(sweep);
    sweep->add_option("--budgets", budgets, "Budget list (default log-spaced grid)")->delimiter(',');
    sweep->add_option("--timing-reps", timing_reps, "Plan calls per budget for the timing sweep (0 = skip)");
    auto* compare = app.add_subcommand("compare", "Real-time survival of both planners against the mouse reference");
    add_common(compare);
    auto* replay = app.add_subcommand("replay", "Re-simulate a trace and verify its hash");
    replay->add_option("--trace", trace_file, "Trace CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*analyze) return cmd_analyze(flags);
        if (*run) return cmd_run(flags);
        if (*sweep) return cmd_sweep(flags, budgets, timing_reps);
        if (*compare) return cmd_compare(flags);
        if (*replay) return cmd_replay(trace_file);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const WorldError& e) {
        std::cerr << "world error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const GraphConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
