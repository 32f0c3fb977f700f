#include "tlppo/predator.hpp"

#include <algorithm>

namespace tlppo {

std::vector<CellId> pending_path(const PredatorState& s, const HexGrid& grid) {
    std::vector<CellId> out;
    if (!s.has_path()) return out;
    CellId cur = s.position;
    while (cur != s.destination) {
        cur = grid.next_hop(cur, s.destination);
        if (cur == kNoCell) return {};
        out.push_back(cur);
    }
    return out;
}

std::vector<CellId> spawn_candidates(const HexGrid& grid, CellId prey_entry) {
    const CellId gate = grid.start_gate();
    std::vector<std::pair<double, CellId>> ranked;
    for (CellId c : grid.free_cells()) ranked.emplace_back(grid.distance_sq_cells(gate, c), c);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t third = (ranked.size() + 2) / 3;
    if (third == 0) return {};
    // Cells tied with the last member of the top third are included as well.
    const double cutoff = ranked[third - 1].first - 1e-9;

    std::vector<CellId> out;
    for (const auto& [d2, c] : ranked) {
        if (d2 < cutoff) break;
        if (!grid.visible(prey_entry, c)) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

CellId spawn_cell(const HexGrid& grid, CellId prey_entry, Rng& rng) {
    const auto candidates = spawn_candidates(grid, prey_entry);
    if (candidates.empty()) {
        throw SpawnError("spawn_cell: no free cell in the furthest third is hidden from the prey entry");
    }
    return candidates[uniform_index(rng, candidates.size())];
}

PredatorState predator_step(const PredatorState& s, CellId prey_pos, const HexGrid& grid, Rng& rng) {
    PredatorState next = s;
    if (grid.visible(s.position, prey_pos)) {
        next.last_seen_prey = prey_pos;
        next.destination = prey_pos;
    } else if (!s.has_path()) {
        const auto hidden = grid.hidden_from(s.position);
        if (!hidden.empty()) {
            next.destination = hidden[uniform_index(rng, hidden.size())];
        } else {
            const auto free = grid.free_cells();
            do {
                next.destination = free[uniform_index(rng, free.size())];
            } while (next.destination == s.position && free.size() > 1);
        }
    }
    if (next.destination != kNoCell && next.destination != next.position) {
        next.position = grid.next_hop(next.position, next.destination);
    }
    return next;
}

}  // namespace tlppo
