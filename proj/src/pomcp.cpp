#include "tlppo/pomcp.hpp"

#include <stdexcept>

namespace tlppo {

PomcpPlanner::PomcpPlanner(const HexGrid& grid, PomcpConfig config)
    : grid_(&grid), config_(config), rng_(config.seed) {
    config_.rewards.validate();
    if (config_.horizon < 0) throw std::invalid_argument("pomcp: horizon must be nonnegative");
}

PomcpPlanner::NodeId PomcpPlanner::new_node(Move m) {
    stats_.emplace_back();
    child_begin_.push_back(-1);
    child_count_.push_back(0);
    move_.push_back(m);
    leaf_arrivals_.push_back(0);
    return static_cast<NodeId>(stats_.size() - 1);
}

void PomcpPlanner::expand(NodeId node, CellId prey) {
    const auto begin = static_cast<NodeId>(stats_.size());
    std::uint8_t count = 0;
    for (std::size_t m = 0; m < kMoveCount; ++m) {
        if (grid_->apply(prey, move_from_index(m)) == kNoCell) continue;
        new_node(move_from_index(m));
        ++count;
    }
    child_begin_[static_cast<std::size_t>(node)] = begin;
    child_count_[static_cast<std::size_t>(node)] = count;
}

double PomcpPlanner::rollout(JointState s, int depth) {
    return random_rollout(*grid_, config_.rewards, s, depth, config_.horizon, rng_);
}

double PomcpPlanner::simulate(NodeId node, JointState& s, int depth) {
    const auto ni = static_cast<std::size_t>(node);
    if (depth >= config_.horizon) {
        ++leaf_arrivals_[ni];
        return 0.0;
    }
    if (child_begin_[ni] < 0) expand(node, s.prey);

    const auto begin = static_cast<std::size_t>(child_begin_[ni]);
    const std::span<const NodeStats> siblings(stats_.data() + begin, child_count_[ni]);
    const std::size_t pick = ucb1_select(siblings, stats_[ni].visits, config_.c_explore);
    const auto child = static_cast<NodeId>(begin + pick);
    const auto ci = static_cast<std::size_t>(child);

    const Status st = advance_tick(*grid_, s, grid_->apply(s.prey, move_[ci]), rng_);
    const double r = config_.rewards.tick_reward(st);
    double ret = r;
    if (st != Status::running) {
        ++leaf_arrivals_[ci];
    } else if (stats_[ci].visits == 0) {
        ++leaf_arrivals_[ci];
        ret += config_.rewards.discount * rollout(s, depth + 1);
    } else {
        ret += config_.rewards.discount * simulate(child, s, depth + 1);
    }
    stats_[ci].add(ret);
    return ret;
}

PlanResult PomcpPlanner::plan(const Belief& belief, CellId prey, const PlanLimits& limits) {
    if (limits.max_branches == 0) throw std::invalid_argument("pomcp: budget must be at least 1 branch");
    const auto start = Clock::now();
    stats_.clear();
    child_begin_.clear();
    child_count_.clear();
    move_.clear();
    leaf_arrivals_.clear();
    const NodeId root = new_node(Move::stay);
    expand(root, prey);

    PlanResult result;
    for (std::uint64_t b = 0; b < limits.max_branches; ++b) {
        if (limits.deadline && Clock::now() >= *limits.deadline) break;
        JointState s{prey, belief.sample(rng_)};
        const double ret = simulate(root, s, 0);
        stats_[0].add(ret);
        ++result.branches;
    }
    total_branches_ += result.branches;
    if (result.branches > 0) {
        result.action = move_[static_cast<std::size_t>(child_begin_[0]) + most_visited(root_children())];
    }
    result.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

std::span<const NodeStats> PomcpPlanner::root_children() const {
    if (stats_.empty() || child_begin_[0] < 0) return {};
    return {stats_.data() + child_begin_[0], child_count_[0]};
}

std::vector<Move> PomcpPlanner::root_moves() const {
    if (stats_.empty() || child_begin_[0] < 0) return {};
    const auto begin = move_.begin() + child_begin_[0];
    return {begin, begin + child_count_[0]};
}

bool PomcpPlanner::tree_statistics_consistent() const {
    for (std::size_t i = 0; i < stats_.size(); ++i) {
        std::uint64_t sum = leaf_arrivals_[i];
        if (child_begin_[i] >= 0) {
            for (std::size_t c = 0; c < child_count_[i]; ++c) {
                sum += stats_[static_cast<std::size_t>(child_begin_[i]) + c].visits;
            }
        }
        if (sum != stats_[i].visits) return false;
    }
    return true;
}

}  // namespace tlppo
