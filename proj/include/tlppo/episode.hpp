#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlppo/belief.hpp"
#include "tlppo/connectivity.hpp"
#include "tlppo/lppo_graph.hpp"
#include "tlppo/planner.hpp"
#include "tlppo/pomcp.hpp"
#include "tlppo/tlppo.hpp"

namespace tlppo {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PlannerKind { pomcp, tlppo };
enum class Mode { turn_based, real_time };
/// Where TLPPO's macro nodes come from.
enum class LppoSource { centrality, all_cells };

const char* to_string(PlannerKind k);
const char* to_string(Mode m);
PlannerKind parse_planner_kind(const std::string& s);
Mode parse_mode(const std::string& s);

struct PlannerSettings {
    PlannerKind kind = PlannerKind::tlppo;
    std::uint64_t budget_branches = 100;
    double c_explore = 0.7;
    RewardModel rewards;
    int horizon = 50;  // pomcp
    // tlppo
    double percentile = kDefaultLppoPercentile;
    LppoSource lppo_source = LppoSource::centrality;
    EdgeRule edge_rule = EdgeRule::line_of_sight;
    int max_macro_depth = 6;
    int max_macro_ticks = 120;
    MacroRollout rollout = MacroRollout::macro;
};

struct EpisodeConfig {
    std::string world;  // path to the world file
    PlannerSettings planner;
    std::size_t particles = kDefaultParticles;
    std::uint64_t seed = 0;
    Mode mode = Mode::turn_based;
    double budget_s = 0.0;  // real-time only
    int max_ticks = 1000;
    // Optional fixed starts, mainly for scripted scenarios.
    std::optional<HexCoord> prey_start;
    std::optional<HexCoord> predator_start;

    /// Throws ConfigError on an invalid combination.
    void validate() const;
};

EpisodeConfig episode_config_from_json(const std::string& json_text);
EpisodeConfig load_episode_config(const std::filesystem::path& file);
/// Canonical single-line JSON (sorted keys); the basis of the config hash.
std::string episode_config_to_json(const EpisodeConfig& cfg);
std::string config_hash(const EpisodeConfig& cfg);

/// Immutable arena tables shared by every episode on one world.
struct Arena {
    HexGrid grid;
    LppoSet lppo;
    LppoGraph graph;
};

std::shared_ptr<const Arena> make_arena(HexGrid grid, const PlannerSettings& settings);
std::shared_ptr<const Arena> load_arena(const EpisodeConfig& cfg);

std::unique_ptr<Planner> make_planner(const PlannerSettings& settings, const Arena& arena, std::uint64_t seed);

enum class Outcome { survived, captured, censored };
const char* to_string(Outcome o);

struct TraceRow {
    int tick = 0;
    HexCoord prey;
    HexCoord predator;
    std::optional<HexCoord> seen;
    Move action = Move::stay;
    std::uint64_t branches = 0;
    double plan_time_s = 0.0;
    bool overrun = false;
};

struct EpisodeResult {
    Outcome outcome = Outcome::censored;
    int ticks = 0;
    std::vector<TraceRow> trace;
    HexCoord final_prey;
    HexCoord final_predator;
    std::size_t overruns = 0;
    std::size_t depletions = 0;

    /// Hash over every deterministic trace field (plan times excluded).
    std::uint64_t trace_hash() const;
    double mean_plan_time_s() const;
};

/// Stream seeds derived from the episode seed.
struct EpisodeSeeds {
    std::uint64_t world;
    std::uint64_t belief;
    std::uint64_t planner;
    static EpisodeSeeds from(std::uint64_t episode_seed);
};

EpisodeResult run_episode(const EpisodeConfig& cfg, const Arena& arena);
/// Runs with a caller-supplied planner (e.g. an instrumented one).
EpisodeResult run_episode(const EpisodeConfig& cfg, const Arena& arena, Planner& planner);
EpisodeResult run_episode(const EpisodeConfig& cfg);

/// Survivors / total; censored episodes count in the denominator only.
double survival_rate(std::span<const EpisodeResult> results);
double survival_rate(std::size_t survived, std::size_t total);

/// Seconds available per move: cell spacing over prey speed, scaled.
double real_time_budget(double cell_spacing_m, double prey_speed_mps, double safety_fraction);

inline constexpr double kMouseSpeedMps = 0.76;
inline constexpr double kPlanningSafetyFraction = 0.75;
inline constexpr std::uint64_t kRealTimeBranchCap = 1000;

void write_trace_csv(std::ostream& os, const EpisodeConfig& cfg, const EpisodeResult& result);

struct ParsedTrace {
    EpisodeConfig config;
    EpisodeResult result;
    std::uint64_t recorded_hash = 0;
};
ParsedTrace read_trace_csv(std::istream& is);

struct ReplayReport {
    bool ok = false;
    std::string message;
};
/// Re-simulates a turn-based trace from its embedded config and compares.
ReplayReport replay_trace(const ParsedTrace& trace);

}  // namespace tlppo
