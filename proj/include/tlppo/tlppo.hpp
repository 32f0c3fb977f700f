#pragma once

#include <cstdint>
#include <vector>

#include "tlppo/lppo_graph.hpp"
#include "tlppo/planner.hpp"

namespace tlppo {

enum class MacroRollout {
    macro,      // random walk over graph edges
    primitive,  // uniform-random legal moves, as in POMCP
};

struct TlppoConfig {
    std::uint64_t budget_branches = 100;
    double c_explore = 0.7;
    RewardModel rewards;
    int max_macro_depth = 6;
    /// Primitive ticks from the root after which a simulation stops (tree and rollout).
    int max_ticks = 120;
    MacroRollout rollout = MacroRollout::macro;
    std::uint64_t seed = 0;
};

/// Tree search whose edges are shortest paths between mutually visible
/// locations where planning pays off. Each edge is simulated tick by tick
/// against the predator model; the tree only branches on arrival at a node.
class TlppoPlanner final : public Planner {
public:
    /// `grid` and `graph` must outlive the planner.
    TlppoPlanner(const HexGrid& grid, const LppoGraph& graph, TlppoConfig config);

    PlanResult plan(const Belief& belief, CellId prey, const PlanLimits& limits) override;
    std::string_view name() const override { return "tlppo"; }

    const TlppoConfig& config() const { return config_; }

    /// Root statistics and candidate macro targets from the most recent plan call.
    std::span<const NodeStats> root_children() const;
    const std::vector<MacroTarget>& root_targets() const { return root_targets_; }
    /// Longest tree descent of the last call, in macro hops.
    int max_depth_reached() const { return max_depth_reached_; }
    /// Primitive ticks simulated over the planner's lifetime.
    std::uint64_t ticks_simulated() const { return ticks_simulated_; }

    /// Leaf evaluation from a joint state whose prey stands on graph node `node`.
    double rollout(JointState s, std::size_t node, int ticks);

private:
    using NodeId = std::int32_t;

    NodeId new_node(std::size_t target);
    void expand(NodeId node);
    double simulate(NodeId node, JointState& s, int hops, int ticks);
    /// Walks `path` (first cell = current prey cell); returns discounted reward,
    /// sets `status` and advances `ticks`; `disc` ends as gamma^steps.
    double walk(const std::vector<CellId>& path, JointState& s, int& ticks, Status& status, double& disc);

    const HexGrid* grid_;
    const LppoGraph* graph_;
    TlppoConfig config_;
    Rng rng_;

    std::vector<MacroTarget> root_targets_;
    std::vector<NodeStats> stats_;
    std::vector<NodeId> child_begin_;
    std::vector<std::uint16_t> child_count_;
    std::vector<std::uint32_t> target_;  // graph node index the edge leads to
    int max_depth_reached_ = 0;
    std::uint64_t ticks_simulated_ = 0;
};

}  // namespace tlppo
