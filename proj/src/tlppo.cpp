#include "tlppo/tlppo.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace tlppo {

namespace {
constexpr std::uint32_t kRootTarget = std::numeric_limits<std::uint32_t>::max();
}

TlppoPlanner::TlppoPlanner(const HexGrid& grid, const LppoGraph& graph, TlppoConfig config)
    : grid_(&grid), graph_(&graph), config_(config), rng_(config.seed) {
    config_.rewards.validate();
    if (config_.max_macro_depth < 1) throw std::invalid_argument("tlppo: max_macro_depth must be at least 1");
    if (config_.max_ticks < 1) throw std::invalid_argument("tlppo: max_ticks must be at least 1");
}

TlppoPlanner::NodeId TlppoPlanner::new_node(std::size_t target) {
    stats_.emplace_back();
    child_begin_.push_back(-1);
    child_count_.push_back(0);
    target_.push_back(static_cast<std::uint32_t>(target));
    return static_cast<NodeId>(stats_.size() - 1);
}

void TlppoPlanner::expand(NodeId node) {
    const auto ni = static_cast<std::size_t>(node);
    const auto begin = static_cast<NodeId>(stats_.size());
    std::size_t count = 0;
    if (target_[ni] == kRootTarget) {
        for (const auto& t : root_targets_) new_node(t.node);
        count = root_targets_.size();
    } else {
        for (const auto& e : graph_->edges_from(target_[ni])) new_node(e.to);
        count = graph_->edges_from(target_[ni]).size();
    }
    child_begin_[ni] = begin;
    child_count_[ni] = static_cast<std::uint16_t>(count);
}

double TlppoPlanner::walk(const std::vector<CellId>& path, JointState& s, int& ticks, Status& status, double& disc) {
    const auto& rm = config_.rewards;
    double ret = 0.0;
    disc = 1.0;
    status = Status::running;
    for (std::size_t k = 1; k < path.size() && ticks < config_.max_ticks; ++k) {
        status = advance_tick(*grid_, s, path[k], rng_);
        ++ticks;
        ++ticks_simulated_;
        ret += disc * rm.tick_reward(status);
        disc *= rm.discount;
        if (status != Status::running) break;
    }
    return ret;
}

double TlppoPlanner::rollout(JointState s, std::size_t node, int ticks) {
    if (config_.rollout == MacroRollout::primitive) {
        return random_rollout(*grid_, config_.rewards, s, ticks, config_.max_ticks, rng_);
    }
    if (const Status st = evaluate(*grid_, s); st != Status::running) {
        return st == Status::captured ? config_.rewards.capture_reward : config_.rewards.goal_reward;
    }
    double ret = 0.0;
    double disc = 1.0;
    while (ticks < config_.max_ticks) {
        const auto& edges = graph_->edges_from(node);
        if (edges.empty()) break;
        const auto& e = edges[uniform_index(rng_, edges.size())];
        Status st;
        double edge_disc;
        ret += disc * walk(e.path, s, ticks, st, edge_disc);
        disc *= edge_disc;
        if (st != Status::running) break;
        node = e.to;
    }
    return ret;
}

double TlppoPlanner::simulate(NodeId node, JointState& s, int hops, int ticks) {
    const auto ni = static_cast<std::size_t>(node);
    if (hops >= config_.max_macro_depth || ticks >= config_.max_ticks) return 0.0;
    if (child_begin_[ni] < 0) expand(node);
    if (child_count_[ni] == 0) return rollout(s, target_[ni], ticks);
    max_depth_reached_ = std::max(max_depth_reached_, hops + 1);

    const auto begin = static_cast<std::size_t>(child_begin_[ni]);
    const std::span<const NodeStats> siblings(stats_.data() + begin, child_count_[ni]);
    const std::size_t pick = ucb1_select(siblings, stats_[ni].visits, config_.c_explore);
    const auto child = static_cast<NodeId>(begin + pick);
    const auto ci = static_cast<std::size_t>(child);

    const auto& path = target_[ni] == kRootTarget ? root_targets_[pick].path
                                                   : graph_->edges_from(target_[ni])[pick].path;
    Status st;
    double disc;
    double ret = walk(path, s, ticks, st, disc);
    if (st == Status::running) {
        if (stats_[ci].visits == 0) {
            ret += disc * rollout(s, target_[ci], ticks);
        } else {
            ret += disc * simulate(child, s, hops + 1, ticks);
        }
    }
    stats_[ci].add(ret);
    return ret;
}

PlanResult TlppoPlanner::plan(const Belief& belief, CellId prey, const PlanLimits& limits) {
    if (limits.max_branches == 0) throw std::invalid_argument("tlppo: budget must be at least 1 branch");
    const auto start = Clock::now();
    root_targets_ = root_candidates(prey, *graph_, *grid_);
    stats_.clear();
    child_begin_.clear();
    child_count_.clear();
    target_.clear();
    max_depth_reached_ = 0;
    const NodeId root = new_node(kRootTarget);
    expand(root);

    PlanResult result;
    if (root_targets_.empty()) {
        result.action = Move::stay;
        result.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
        return result;
    }
    for (std::uint64_t b = 0; b < limits.max_branches; ++b) {
        if (limits.deadline && Clock::now() >= *limits.deadline) break;
        JointState s{prey, belief.sample(rng_)};
        const double ret = simulate(root, s, 0, 0);
        stats_[0].add(ret);
        ++result.branches;
    }
    total_branches_ += result.branches;
    if (result.branches > 0) {
        const auto& best = root_targets_[most_visited(root_children())];
        result.action = grid_->move_between(prey, best.path.at(1));
    }
    result.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

std::span<const NodeStats> TlppoPlanner::root_children() const {
    if (stats_.empty() || child_begin_[0] < 0) return {};
    return {stats_.data() + child_begin_[0], child_count_[0]};
}

}  // namespace tlppo
