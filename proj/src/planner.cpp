#include "tlppo/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tlppo {

void RewardModel::validate() const {
    if (!(goal_reward > 0.0 && capture_reward < 0.0)) {
        throw std::invalid_argument("reward model: need goal_reward > 0 > capture_reward");
    }
    if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument("reward model: discount must be in (0, 1]");
}

std::size_t ucb1_select(std::span<const NodeStats> children, std::uint32_t parent_visits, double c_explore) {
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (children[i].visits == 0) return i;
    }
    const double log_n = std::log(static_cast<double>(std::max<std::uint32_t>(parent_visits, 1)));
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < children.size(); ++i) {
        const double score = children[i].value + c_explore * std::sqrt(log_n / children[i].visits);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

std::size_t most_visited(std::span<const NodeStats> children) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < children.size(); ++i) {
        const auto& a = children[i];
        const auto& b = children[best];
        if (a.visits > b.visits || (a.visits == b.visits && a.value > b.value)) best = i;
    }
    return best;
}

double random_rollout(const HexGrid& grid, const RewardModel& rm, JointState s, int depth, int horizon, Rng& rng) {
    Status st = evaluate(grid, s);
    if (st != Status::running) return st == Status::captured ? rm.capture_reward : rm.goal_reward;
    double ret = 0.0;
    double disc = 1.0;
    for (; depth < horizon; ++depth) {
        const auto nbrs = grid.free_neighbors(s.prey);
        const std::size_t k = uniform_index(rng, nbrs.size() + 1);
        st = advance_tick(grid, s, k == nbrs.size() ? s.prey : nbrs[k], rng);
        ret += disc * rm.tick_reward(st);
        if (st != Status::running) break;
        disc *= rm.discount;
    }
    return ret;
}

}  // namespace tlppo
