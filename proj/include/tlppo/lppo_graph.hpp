#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tlppo/connectivity.hpp"
#include "tlppo/grid.hpp"

namespace tlppo {

class GraphConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Which node pairs get a macro edge.
enum class EdgeRule {
    line_of_sight,  // default: mutually visible nodes
    adjacent,       // only neighboring cells (degenerate, primitive-move tree)
};

struct MacroEdge {
    std::size_t to = 0;         // node index
    std::vector<CellId> path;   // shortest path, both endpoints included
};

/// Macro-action graph over LPPO cells plus the goal.
class LppoGraph {
public:
    LppoGraph(const HexGrid& grid, const LppoSet& lppo, EdgeRule rule = EdgeRule::line_of_sight);

    std::size_t node_count() const { return nodes_.size(); }
    CellId node_cell(std::size_t i) const { return nodes_[i]; }
    const std::vector<CellId>& nodes() const { return nodes_; }
    /// Node index of a cell, or -1.
    std::ptrdiff_t node_of(CellId c) const { return node_of_[static_cast<std::size_t>(c)]; }
    std::size_t goal_node() const { return goal_node_; }
    EdgeRule rule() const { return rule_; }

    const std::vector<MacroEdge>& edges_from(std::size_t node) const { return out_[node]; }
    std::size_t edge_count() const;

    /// Whether `from` may start a macro edge toward node cell `to` under the edge rule.
    bool connects(const HexGrid& grid, CellId from, CellId to) const;
    /// True when no node could see the goal and the nearest one was linked to it instead.
    bool has_fallback_goal_edge() const { return fallback_goal_edge_; }

private:
    void link_goal(const HexGrid& grid);

    EdgeRule rule_;
    std::vector<CellId> nodes_;
    std::vector<std::ptrdiff_t> node_of_;
    std::size_t goal_node_ = 0;
    std::vector<std::vector<MacroEdge>> out_;
    bool fallback_goal_edge_ = false;
};

/// Line-of-sight graphs whose goal is seen by no node get one fallback edge into
/// the goal from the nearest node. Throws GraphConfigError when the goal still has
/// no incoming edge in a multi-node graph (possible only under the adjacency rule).
LppoGraph build_lppo_graph(const HexGrid& grid, const LppoSet& lppo, EdgeRule rule = EdgeRule::line_of_sight);

struct MacroTarget {
    std::size_t node = 0;
    std::vector<CellId> path;  // from the prey cell to the node cell
};

/// Nodes reachable by one macro edge from `prey` (never the prey's own cell).
/// When none qualifies, falls back to the node with the shortest path.
std::vector<MacroTarget> root_candidates(CellId prey, const LppoGraph& graph, const HexGrid& grid);

}  // namespace tlppo
