#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "tlppo/episode.hpp"

namespace tlppo {

/// One point of a survival or timing sweep.
struct SweepRecord {
    PlannerKind planner = PlannerKind::tlppo;
    std::uint64_t budget_branches = 0;
    std::size_t episodes = 0;
    std::size_t survived = 0;
    std::size_t captured = 0;
    std::size_t censored = 0;
    double survival = 0.0;
    std::pair<double, double> survival_ci95{0.0, 0.0};
    double mean_plan_time_s = 0.0;
    double time_per_branch_s = 0.0;
};

/// Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

/// One-sided exact sign test on paired outcomes: p-value of at least as many
/// pairs where only `a` succeeded, out of the discordant pairs, under p = 1/2.
double paired_sign_test(const std::vector<bool>& a, const std::vector<bool>& b);

/// Per-episode seed; identical across planners so comparisons are paired.
std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t episode);

/// Number of worker threads to use when the caller passes 0.
std::size_t default_workers();

/// Runs `episodes` turn-based or real-time episodes of `base` with the planner
/// kind and budget overridden; results are ordered by episode index.
std::vector<EpisodeResult> run_episodes(const EpisodeConfig& base, const Arena& arena, PlannerKind kind,
                                        std::uint64_t budget, std::size_t episodes, std::size_t workers);

SweepRecord summarize(PlannerKind kind, std::uint64_t budget, const std::vector<EpisodeResult>& results);

struct SweepOptions {
    std::vector<std::uint64_t> budgets;
    std::size_t episodes_per_point = 200;
    std::size_t workers = 0;
    /// When set, each finished point is cached here and reused on rerun.
    std::optional<std::filesystem::path> cache_dir;
};

/// Survival as a function of branches sampled (turn-based).
std::vector<SweepRecord> sweep_survival(PlannerKind kind, const SweepOptions& opts, const EpisodeConfig& base,
                                        const Arena& arena);

/// Wall-clock plan time per budget from a fixed mid-route state, single-threaded.
std::vector<SweepRecord> sweep_timing(PlannerKind kind, const std::vector<std::uint64_t>& budgets, std::size_t reps,
                                      const EpisodeConfig& base, const Arena& arena);

struct HistogramRow {
    std::string agent;
    std::size_t episodes = 0;
    std::size_t survived = 0;
    double survival = 0.0;
    std::pair<double, double> survival_ci95{0.0, 0.0};
};

inline constexpr double kMouseSurvival = 0.86;
inline constexpr std::size_t kMouseTrajectories = 230;

struct CompareResult {
    std::vector<HistogramRow> rows;  // tlppo, pomcp, reference_mice
    std::vector<EpisodeResult> tlppo;
    std::vector<EpisodeResult> pomcp;
    double budget_s = 0.0;
};

/// Real-time survival of both planners under the move-time budget and the
/// real-time branch cap, plus the fixed live-mouse reference row.
CompareResult compare_realtime(const EpisodeConfig& base, const Arena& arena, std::size_t episodes,
                               std::size_t workers);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records, const EpisodeConfig& base,
                     std::size_t episodes_per_point);
void write_hist_csv(std::ostream& os, const CompareResult& result, const EpisodeConfig& base);

}  // namespace tlppo
