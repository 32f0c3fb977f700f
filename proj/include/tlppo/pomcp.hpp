#pragma once

#include <cstdint>
#include <vector>

#include "tlppo/planner.hpp"

namespace tlppo {

struct PomcpConfig {
    std::uint64_t budget_branches = 1000;
    double c_explore = 0.7;
    RewardModel rewards;
    /// Ticks from the root after which a simulation stops accruing reward.
    int horizon = 50;
    std::uint64_t seed = 0;
};

/// Monte-Carlo tree search over primitive moves with belief root sampling.
/// The tree is keyed by action sequence and rebuilt on every call.
class PomcpPlanner final : public Planner {
public:
    /// `grid` must outlive the planner.
    PomcpPlanner(const HexGrid& grid, PomcpConfig config);

    PlanResult plan(const Belief& belief, CellId prey, const PlanLimits& limits) override;
    std::string_view name() const override { return "pomcp"; }

    /// Uniform-random legal moves (stay included) until terminal or horizon.
    double rollout(JointState s, int depth);

    const PomcpConfig& config() const { return config_; }

    /// Root statistics from the most recent plan call.
    std::span<const NodeStats> root_children() const;
    std::vector<Move> root_moves() const;
    /// Checks N(node) = sum of child visits + rollout/terminal arrivals for every node.
    bool tree_statistics_consistent() const;

private:
    using NodeId = std::int32_t;

    NodeId new_node(Move m);
    void expand(NodeId node, CellId prey);
    double simulate(NodeId node, JointState& s, int depth);

    const HexGrid* grid_;
    PomcpConfig config_;
    Rng rng_;

    // Struct-of-arrays node pool; siblings are contiguous so UCB1 can scan a span.
    std::vector<NodeStats> stats_;
    std::vector<NodeId> child_begin_;
    std::vector<std::uint8_t> child_count_;
    std::vector<Move> move_;
    std::vector<std::uint32_t> leaf_arrivals_;
};

}  // namespace tlppo
