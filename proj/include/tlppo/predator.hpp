#pragma once

#include <stdexcept>
#include <vector>

#include "tlppo/grid.hpp"
#include "tlppo/rng.hpp"

namespace tlppo {

class SpawnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reactive robot predator. The pending path is implicit: it is the grid's
/// canonical shortest route from `position` to `destination`, so a state is a
/// few integers and is cheap to copy inside planner simulations.
struct PredatorState {
    CellId position = kNoCell;
    /// kNoCell when there is no pending path.
    CellId destination = kNoCell;
    CellId last_seen_prey = kNoCell;

    bool has_path() const { return destination != kNoCell && destination != position; }
    friend bool operator==(const PredatorState&, const PredatorState&) = default;
};

/// Remainder of the route the predator is committed to (excludes its current cell).
std::vector<CellId> pending_path(const PredatorState& s, const HexGrid& grid);

/// Free cells in the furthest third from the start gate that are hidden from `prey_entry`.
std::vector<CellId> spawn_candidates(const HexGrid& grid, CellId prey_entry);

/// Uniform draw from spawn_candidates. Throws SpawnError when there is none.
CellId spawn_cell(const HexGrid& grid, CellId prey_entry, Rng& rng);

/// One tick of the robot behavior: chase the prey while visible, otherwise
/// finish the committed route, then pick a random cell hidden from itself.
PredatorState predator_step(const PredatorState& s, CellId prey_pos, const HexGrid& grid, Rng& rng);

/// The same transition, used as the planners' generative model.
inline PredatorState generative_step(const PredatorState& s, CellId prey_pos, const HexGrid& grid, Rng& rng) {
    return predator_step(s, prey_pos, grid, rng);
}

}  // namespace tlppo
