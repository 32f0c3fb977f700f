#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "tlppo/belief.hpp"
#include "tlppo/grid.hpp"
#include "tlppo/rules.hpp"

namespace tlppo {

using Clock = std::chrono::steady_clock;

/// Sparse terminal rewards plus a per-tick cost. Returns are discounted per tick.
struct RewardModel {
    double goal_reward = 1.0;
    double capture_reward = -1.0;
    double step_reward = -0.005;
    double discount = 0.98;

    /// Throws std::invalid_argument unless goal > 0 > capture and 0 < discount <= 1.
    void validate() const;

    double tick_reward(Status s) const {
        switch (s) {
            case Status::captured: return step_reward + capture_reward;
            case Status::reached_goal: return step_reward + goal_reward;
            case Status::running: break;
        }
        return step_reward;
    }
};

/// Visit count and running-mean return of one tree branch.
struct NodeStats {
    std::uint32_t visits = 0;
    double value = 0.0;

    void add(double ret) {
        ++visits;
        value += (ret - value) / static_cast<double>(visits);
    }
};

/// UCB1 over sibling statistics. Unvisited children are taken first in order;
/// otherwise argmax of Q + c * sqrt(ln N / n), ties to the lower index.
std::size_t ucb1_select(std::span<const NodeStats> children, std::uint32_t parent_visits, double c_explore);

/// Index of the most visited child, ties to the higher value then lower index.
std::size_t most_visited(std::span<const NodeStats> children);

/// Uniform-random legal prey moves (stay included) from tick `depth` until a
/// terminal state or `horizon`; discounted return relative to the start state.
double random_rollout(const HexGrid& grid, const RewardModel& rm, JointState s, int depth, int horizon, Rng& rng);

struct PlanLimits {
    std::uint64_t max_branches = 1;
    /// Anytime mode: stop at this instant and report the current best action.
    std::optional<Clock::time_point> deadline;
};

struct PlanResult {
    /// Empty when no simulation completed before the deadline.
    std::optional<Move> action;
    std::uint64_t branches = 0;
    double elapsed_s = 0.0;
};

/// Online planner interface shared by POMCP and TLPPO. A planner owns its
/// random stream; one plan call is single-threaded and the object may be
/// moved between threads between calls.
class Planner {
public:
    virtual ~Planner() = default;

    virtual PlanResult plan(const Belief& belief, CellId prey, const PlanLimits& limits) = 0;
    virtual std::string_view name() const = 0;

    /// Simulations run over the planner's lifetime.
    std::uint64_t total_branches() const { return total_branches_; }

protected:
    std::uint64_t total_branches_ = 0;
};

}  // namespace tlppo
