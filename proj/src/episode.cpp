#include "tlppo/episode.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tlppo/io.hpp"
#include "tlppo/rules.hpp"

namespace tlppo {

using nlohmann::json;

const char* to_string(PlannerKind k) { return k == PlannerKind::pomcp ? "pomcp" : "tlppo"; }
const char* to_string(Mode m) { return m == Mode::turn_based ? "turn_based" : "real_time"; }

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::survived: return "survived";
        case Outcome::captured: return "captured";
        case Outcome::censored: return "censored";
    }
    return "?";
}

PlannerKind parse_planner_kind(const std::string& s) {
    if (s == "pomcp") return PlannerKind::pomcp;
    if (s == "tlppo") return PlannerKind::tlppo;
    throw ConfigError("unknown planner kind '" + s + "' (expected pomcp or tlppo)");
}

Mode parse_mode(const std::string& s) {
    if (s == "turn_based" || s == "turn") return Mode::turn_based;
    if (s == "real_time" || s == "real") return Mode::real_time;
    throw ConfigError("unknown mode '" + s + "' (expected turn or real)");
}

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
}

HexCoord coord_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("expected [q, r]");
    return {j[0].get<int>(), j[1].get<int>()};
}

PlannerSettings planner_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"kind", "budget_branches", "c_explore", "goal_reward", "capture_reward", "step_reward",
                         "discount", "horizon", "percentile", "lppo_source", "edge_rule", "max_macro_depth",
                         "max_macro_ticks", "rollout"},
                        "planner");
    PlannerSettings p;
    p.kind = parse_planner_kind(j.value("kind", std::string("tlppo")));
    p.budget_branches = j.value("budget_branches", p.budget_branches);
    p.c_explore = j.value("c_explore", p.c_explore);
    p.rewards.goal_reward = j.value("goal_reward", p.rewards.goal_reward);
    p.rewards.capture_reward = j.value("capture_reward", p.rewards.capture_reward);
    p.rewards.step_reward = j.value("step_reward", p.rewards.step_reward);
    p.rewards.discount = j.value("discount", p.rewards.discount);
    p.horizon = j.value("horizon", p.horizon);
    p.percentile = j.value("percentile", p.percentile);
    const auto source = j.value("lppo_source", std::string("centrality"));
    if (source == "centrality") p.lppo_source = LppoSource::centrality;
    else if (source == "all_cells") p.lppo_source = LppoSource::all_cells;
    else throw ConfigError("planner.lppo_source must be centrality or all_cells");
    const auto rule = j.value("edge_rule", std::string("line_of_sight"));
    if (rule == "line_of_sight") p.edge_rule = EdgeRule::line_of_sight;
    else if (rule == "adjacent") p.edge_rule = EdgeRule::adjacent;
    else throw ConfigError("planner.edge_rule must be line_of_sight or adjacent");
    p.max_macro_depth = j.value("max_macro_depth", p.max_macro_depth);
    p.max_macro_ticks = j.value("max_macro_ticks", p.max_macro_ticks);
    const auto ro = j.value("rollout", std::string("macro"));
    if (ro == "macro") p.rollout = MacroRollout::macro;
    else if (ro == "primitive") p.rollout = MacroRollout::primitive;
    else throw ConfigError("planner.rollout must be macro or primitive");
    return p;
}

json planner_to_json(const PlannerSettings& p) {
    return {
        {"kind", to_string(p.kind)},
        {"budget_branches", p.budget_branches},
        {"c_explore", p.c_explore},
        {"goal_reward", p.rewards.goal_reward},
        {"capture_reward", p.rewards.capture_reward},
        {"step_reward", p.rewards.step_reward},
        {"discount", p.rewards.discount},
        {"horizon", p.horizon},
        {"percentile", p.percentile},
        {"lppo_source", p.lppo_source == LppoSource::centrality ? "centrality" : "all_cells"},
        {"edge_rule", p.edge_rule == EdgeRule::line_of_sight ? "line_of_sight" : "adjacent"},
        {"max_macro_depth", p.max_macro_depth},
        {"max_macro_ticks", p.max_macro_ticks},
        {"rollout", p.rollout == MacroRollout::macro ? "macro" : "primitive"},
    };
}

}  // namespace

void EpisodeConfig::validate() const {
    if (particles == 0) throw ConfigError("particles must be at least 1");
    if (max_ticks < 1) throw ConfigError("max_ticks must be at least 1");
    if (planner.budget_branches == 0) throw ConfigError("planner.budget_branches must be at least 1");
    if (mode == Mode::real_time && !(budget_s > 0.0)) throw ConfigError("budget_s must be positive in real-time mode");
    if (!(planner.percentile > 0.0 && planner.percentile < 100.0)) {
        throw ConfigError("planner.percentile must be in (0, 100)");
    }
    if (planner.horizon < 0 || planner.max_macro_depth < 1 || planner.max_macro_ticks < 1) {
        throw ConfigError("planner depth limits must be positive");
    }
    try {
        planner.rewards.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

EpisodeConfig episode_config_from_json(const std::string& json_text) {
    EpisodeConfig cfg;
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) throw ConfigError("episode config: top level must be an object");
        reject_unknown_keys(j,
                            {"world", "planner", "particles", "seed", "mode", "budget_s", "max_ticks", "prey_start",
                             "predator_start"},
                            "episode config");
        cfg.world = j.value("world", std::string());
        if (j.contains("planner")) cfg.planner = planner_from_json(j["planner"]);
        cfg.particles = j.value("particles", cfg.particles);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.mode = parse_mode(j.value("mode", std::string("turn_based")));
        cfg.budget_s = j.value("budget_s", cfg.budget_s);
        cfg.max_ticks = j.value("max_ticks", cfg.max_ticks);
        if (j.contains("prey_start") && !j["prey_start"].is_null()) cfg.prey_start = coord_from_json(j["prey_start"]);
        if (j.contains("predator_start") && !j["predator_start"].is_null()) {
            cfg.predator_start = coord_from_json(j["predator_start"]);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("episode config: ") + e.what());
    }
    return cfg;
}

EpisodeConfig load_episode_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return episode_config_from_json(ss.str());
}

std::string episode_config_to_json(const EpisodeConfig& cfg) {
    json j{
        {"world", cfg.world},
        {"planner", planner_to_json(cfg.planner)},
        {"particles", cfg.particles},
        {"seed", cfg.seed},
        {"mode", to_string(cfg.mode)},
        {"budget_s", cfg.budget_s},
        {"max_ticks", cfg.max_ticks},
    };
    if (cfg.prey_start) j["prey_start"] = {cfg.prey_start->q, cfg.prey_start->r};
    if (cfg.predator_start) j["predator_start"] = {cfg.predator_start->q, cfg.predator_start->r};
    return j.dump();
}

std::string config_hash(const EpisodeConfig& cfg) {
    Fnv1a h;
    h.update(episode_config_to_json(cfg));
    return hex64(h.digest());
}

std::shared_ptr<const Arena> make_arena(HexGrid grid, const PlannerSettings& settings) {
    LppoSet lppo;
    if (settings.lppo_source == LppoSource::all_cells) {
        lppo.locations.assign(grid.free_cells().begin(), grid.free_cells().end());
    } else {
        lppo = lppo_pipeline(grid, settings.percentile);
    }
    LppoGraph graph = build_lppo_graph(grid, lppo, settings.edge_rule);
    return std::make_shared<const Arena>(Arena{std::move(grid), std::move(lppo), std::move(graph)});
}

std::shared_ptr<const Arena> load_arena(const EpisodeConfig& cfg) {
    return make_arena(load_grid(cfg.world), cfg.planner);
}

std::unique_ptr<Planner> make_planner(const PlannerSettings& s, const Arena& arena, std::uint64_t seed) {
    if (s.kind == PlannerKind::pomcp) {
        PomcpConfig pc;
        pc.budget_branches = s.budget_branches;
        pc.c_explore = s.c_explore;
        pc.rewards = s.rewards;
        pc.horizon = s.horizon;
        pc.seed = seed;
        return std::make_unique<PomcpPlanner>(arena.grid, pc);
    }
    TlppoConfig tc;
    tc.budget_branches = s.budget_branches;
    tc.c_explore = s.c_explore;
    tc.rewards = s.rewards;
    tc.max_macro_depth = s.max_macro_depth;
    tc.max_ticks = s.max_macro_ticks;
    tc.rollout = s.rollout;
    tc.seed = seed;
    return std::make_unique<TlppoPlanner>(arena.grid, arena.graph, tc);
}

EpisodeSeeds EpisodeSeeds::from(std::uint64_t episode_seed) {
    return {derive_seed(episode_seed, 1), derive_seed(episode_seed, 2), derive_seed(episode_seed, 3)};
}

std::uint64_t EpisodeResult::trace_hash() const {
    Fnv1a h;
    for (const auto& row : trace) {
        h.update_value(row.tick);
        h.update_value(row.prey);
        h.update_value(row.predator);
        const HexCoord seen = row.seen.value_or(HexCoord{INT32_MIN, INT32_MIN});
        h.update_value(seen);
        h.update_value(row.action);
        h.update_value(row.branches);
    }
    h.update_value(outcome);
    h.update_value(ticks);
    h.update_value(final_prey);
    h.update_value(final_predator);
    return h.digest();
}

double EpisodeResult::mean_plan_time_s() const {
    if (trace.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : trace) sum += r.plan_time_s;
    return sum / static_cast<double>(trace.size());
}

EpisodeResult run_episode(const EpisodeConfig& cfg, const Arena& arena, Planner& planner) {
    cfg.validate();
    const HexGrid& grid = arena.grid;
    const auto seeds = EpisodeSeeds::from(cfg.seed);
    Rng world_rng(seeds.world);
    Rng belief_rng(seeds.belief);

    const CellId entry = cfg.prey_start ? grid.id(*cfg.prey_start) : grid.start_gate();
    JointState state;
    state.prey = entry;
    state.predator.position =
        cfg.predator_start ? grid.id(*cfg.predator_start) : spawn_cell(grid, grid.start_gate(), world_rng);
    if (grid.is_occluded(state.prey) || grid.is_occluded(state.predator.position)) {
        throw ConfigError("episode config: start cell is occluded");
    }
    Belief belief = init_belief(grid, grid.start_gate(), cfg.particles, belief_rng);

    EpisodeResult result;
    Status status = evaluate(grid, state);
    int tick = 0;
    while (status == Status::running && tick < cfg.max_ticks) {
        const auto obs = Observation::observe(grid, state.prey, state.predator.position);
        if (tick == 0) {
            belief.condition(state.prey, obs, grid, belief_rng);
        } else {
            belief.update(state.prey, obs, grid, belief_rng);
        }

        PlanLimits limits{cfg.planner.budget_branches, std::nullopt};
        if (cfg.mode == Mode::real_time) {
            limits.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                                 std::chrono::duration<double>(cfg.budget_s));
        }
        const PlanResult plan = planner.plan(belief, state.prey, limits);

        TraceRow row;
        row.tick = tick;
        row.prey = grid.coord(state.prey);
        row.predator = grid.coord(state.predator.position);
        if (obs.predator_seen) row.seen = grid.coord(*obs.predator_seen);
        row.action = plan.action.value_or(Move::stay);
        row.branches = plan.branches;
        row.plan_time_s = plan.elapsed_s;
        if (cfg.mode == Mode::real_time && plan.elapsed_s > cfg.budget_s) {
            // The world does not wait: a late decision is dropped and the prey holds still.
            row.overrun = true;
            row.action = Move::stay;
            ++result.overruns;
        }
        CellId next = grid.apply(state.prey, row.action);
        if (next == kNoCell) next = state.prey;
        result.trace.push_back(row);

        status = advance_tick(grid, state, next, world_rng);
        ++tick;
    }

    result.ticks = tick;
    result.final_prey = grid.coord(state.prey);
    result.final_predator = grid.coord(state.predator.position);
    result.depletions = belief.depletions();
    result.outcome = status == Status::reached_goal ? Outcome::survived
                     : status == Status::captured   ? Outcome::captured
                                                    : Outcome::censored;
    return result;
}

EpisodeResult run_episode(const EpisodeConfig& cfg, const Arena& arena) {
    auto planner = make_planner(cfg.planner, arena, EpisodeSeeds::from(cfg.seed).planner);
    return run_episode(cfg, arena, *planner);
}

EpisodeResult run_episode(const EpisodeConfig& cfg) {
    cfg.validate();
    return run_episode(cfg, *load_arena(cfg));
}

double survival_rate(std::size_t survived, std::size_t total) {
    if (total == 0) throw std::invalid_argument("survival_rate: no episodes");
    return static_cast<double>(survived) / static_cast<double>(total);
}

double survival_rate(std::span<const EpisodeResult> results) {
    const auto survived = static_cast<std::size_t>(std::count_if(
        results.begin(), results.end(), [](const EpisodeResult& r) { return r.outcome == Outcome::survived; }));
    return survival_rate(survived, results.size());
}

double real_time_budget(double cell_spacing_m, double prey_speed_mps, double safety_fraction) {
    if (!(cell_spacing_m > 0.0) || !(prey_speed_mps > 0.0) || safety_fraction < 0.0) {
        throw std::invalid_argument("real_time_budget: spacing and speed must be positive, fraction nonnegative");
    }
    return cell_spacing_m / prey_speed_mps * safety_fraction;
}

void write_trace_csv(std::ostream& os, const EpisodeConfig& cfg, const EpisodeResult& result) {
    write_metadata(os, config_hash(cfg), cfg.seed);
    os << "# config: " << episode_config_to_json(cfg) << '\n';
    os << "# outcome: " << to_string(result.outcome) << '\n';
    os << "# ticks: " << result.ticks << '\n';
    os << "# final: " << result.final_prey.q << ' ' << result.final_prey.r << ' ' << result.final_predator.q << ' '
       << result.final_predator.r << '\n';
    os << "# trace_hash: " << hex64(result.trace_hash()) << '\n';
    os << "tick,prey_q,prey_r,predator_q,predator_r,seen_q,seen_r,action,branches,plan_time_s,overrun\n";
    os << std::setprecision(9);
    for (const auto& r : result.trace) {
        os << r.tick << ',' << r.prey.q << ',' << r.prey.r << ',' << r.predator.q << ',' << r.predator.r << ',';
        if (r.seen) os << r.seen->q << ',' << r.seen->r;
        else os << ',';
        os << ',' << move_name(r.action) << ',' << r.branches << ',' << r.plan_time_s << ',' << (r.overrun ? 1 : 0)
           << '\n';
    }
}

namespace {

Move parse_move(const std::string& s) {
    for (std::size_t i = 0; i < kMoveCount; ++i) {
        if (s == move_name(move_from_index(i))) return move_from_index(i);
    }
    throw ConfigError("trace: unknown action '" + s + "'");
}

Outcome parse_outcome(const std::string& s) {
    if (s == "survived") return Outcome::survived;
    if (s == "captured") return Outcome::captured;
    if (s == "censored") return Outcome::censored;
    throw ConfigError("trace: unknown outcome '" + s + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

ParsedTrace read_trace_csv(std::istream& is) {
    ParsedTrace out;
    bool have_config = false;
    bool have_header = false;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ");
            if (colon == std::string::npos) continue;
            const std::string key = line.substr(2, colon - 2);
            const std::string value = line.substr(colon + 2);
            if (key == "config") {
                out.config = episode_config_from_json(value);
                have_config = true;
            } else if (key == "outcome") {
                out.result.outcome = parse_outcome(value);
            } else if (key == "ticks") {
                out.result.ticks = std::stoi(value);
            } else if (key == "final") {
                std::istringstream ss(value);
                ss >> out.result.final_prey.q >> out.result.final_prey.r >> out.result.final_predator.q >>
                    out.result.final_predator.r;
            } else if (key == "trace_hash") {
                out.recorded_hash = std::stoull(value, nullptr, 16);
            }
            continue;
        }
        if (!have_header) {
            have_header = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 11) throw ConfigError("trace: expected 11 columns, got " + std::to_string(f.size()));
        TraceRow r;
        r.tick = std::stoi(f[0]);
        r.prey = {std::stoi(f[1]), std::stoi(f[2])};
        r.predator = {std::stoi(f[3]), std::stoi(f[4])};
        if (!f[5].empty()) r.seen = HexCoord{std::stoi(f[5]), std::stoi(f[6])};
        r.action = parse_move(f[7]);
        r.branches = std::stoull(f[8]);
        r.plan_time_s = std::stod(f[9]);
        r.overrun = f[10] == "1";
        out.result.trace.push_back(r);
    }
    if (!have_config) throw ConfigError("trace: missing '# config:' metadata line");
    return out;
}

ReplayReport replay_trace(const ParsedTrace& trace) {
    if (trace.config.mode != Mode::turn_based) {
        return {false, "real-time traces depend on wall-clock timing and cannot be replayed"};
    }
    const std::uint64_t stored = trace.result.trace_hash();
    if (trace.recorded_hash != 0 && stored != trace.recorded_hash) {
        return {false, "trace file is inconsistent with its recorded hash " + hex64(trace.recorded_hash)};
    }
    const EpisodeResult again = run_episode(trace.config);
    if (again.trace.size() != trace.result.trace.size()) {
        return {false, "replay diverged: " + std::to_string(again.trace.size()) + " ticks vs " +
                           std::to_string(trace.result.trace.size()) + " recorded"};
    }
    const std::uint64_t fresh = again.trace_hash();
    if (fresh != stored) {
        for (std::size_t i = 0; i < again.trace.size(); ++i) {
            const auto& a = again.trace[i];
            const auto& b = trace.result.trace[i];
            if (a.prey != b.prey || a.predator != b.predator || a.seen != b.seen || a.action != b.action ||
                a.branches != b.branches) {
                return {false, "replay diverged at tick " + std::to_string(a.tick)};
            }
        }
        return {false, "replay diverged in outcome"};
    }
    return {true, "replay verified: " + std::to_string(again.ticks) + " ticks, outcome " + to_string(again.outcome) +
                      ", trace hash " + hex64(fresh)};
}

}  // namespace tlppo
