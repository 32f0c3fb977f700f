#include "tlppo/lppo_graph.hpp"

#include <algorithm>

namespace tlppo {

LppoGraph::LppoGraph(const HexGrid& grid, const LppoSet& lppo, EdgeRule rule) : rule_(rule) {
    nodes_ = lppo.locations;
    nodes_.push_back(grid.goal());
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    node_of_.assign(grid.cell_count(), -1);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (grid.is_occluded(nodes_[i])) throw GraphConfigError("lppo graph: node on an occluded cell");
        node_of_[static_cast<std::size_t>(nodes_[i])] = static_cast<std::ptrdiff_t>(i);
        if (nodes_[i] == grid.goal()) goal_node_ = i;
    }
    out_.resize(nodes_.size());
    for (std::size_t a = 0; a < nodes_.size(); ++a) {
        for (std::size_t b = 0; b < nodes_.size(); ++b) {
            if (a == b || !connects(grid, nodes_[a], nodes_[b])) continue;
            out_[a].push_back({b, shortest_path_ids(grid, nodes_[a], nodes_[b])});
        }
    }
    if (rule_ == EdgeRule::line_of_sight && nodes_.size() > 1) link_goal(grid);
}

void LppoGraph::link_goal(const HexGrid& grid) {
    for (const auto& edges : out_) {
        for (const auto& e : edges) {
            if (e.to == goal_node_) return;
        }
    }
    // No node sees the goal: the node closest to it by walking gets a direct edge.
    std::size_t best = nodes_.size();
    std::uint16_t best_hops = HexGrid::kUnreachable;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (i == goal_node_) continue;
        if (const auto h = grid.hops(nodes_[i], grid.goal()); h < best_hops) {
            best_hops = h;
            best = i;
        }
    }
    if (best == nodes_.size()) return;
    out_[best].push_back({goal_node_, shortest_path_ids(grid, nodes_[best], grid.goal())});
    fallback_goal_edge_ = true;
}

bool LppoGraph::connects(const HexGrid& grid, CellId from, CellId to) const {
    if (from == to) return false;
    if (rule_ == EdgeRule::adjacent) return grid.hops(from, to) == 1;
    return grid.visible(from, to);
}

std::size_t LppoGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& e : out_) n += e.size();
    return n;
}

LppoGraph build_lppo_graph(const HexGrid& grid, const LppoSet& lppo, EdgeRule rule) {
    LppoGraph g(grid, lppo, rule);
    if (g.node_count() > 1) {
        bool goal_reachable = false;
        for (std::size_t i = 0; i < g.node_count() && !goal_reachable; ++i) {
            for (const auto& e : g.edges_from(i)) goal_reachable |= e.to == g.goal_node();
        }
        if (!goal_reachable) throw GraphConfigError("lppo graph: no LPPO location connects to the goal");
    }
    return g;
}

std::vector<MacroTarget> root_candidates(CellId prey, const LppoGraph& graph, const HexGrid& grid) {
    std::vector<MacroTarget> out;
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
        if (graph.connects(grid, prey, graph.node_cell(i))) out.push_back({i, shortest_path_ids(grid, prey, graph.node_cell(i))});
    }
    if (!out.empty()) return out;

    std::size_t best = graph.node_count();
    std::uint16_t best_hops = HexGrid::kUnreachable;
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
        const CellId c = graph.node_cell(i);
        if (c == prey) continue;
        if (const auto h = grid.hops(prey, c); h < best_hops) {
            best_hops = h;
            best = i;
        }
    }
    if (best < graph.node_count()) out.push_back({best, shortest_path_ids(grid, prey, graph.node_cell(best))});
    return out;
}

}  // namespace tlppo
