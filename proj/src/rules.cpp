#include "tlppo/rules.hpp"

namespace tlppo {

Status evaluate(const HexGrid& grid, const JointState& s) {
    if (is_capture(grid, s.prey, s.predator.position)) return Status::captured;
    if (s.prey == grid.goal()) return Status::reached_goal;
    return Status::running;
}

Status advance_tick(const HexGrid& grid, JointState& s, CellId prey_next, Rng& rng) {
    s.prey = prey_next;
    if (const auto st = evaluate(grid, s); st != Status::running) return st;
    s.predator = predator_step(s.predator, s.prey, grid, rng);
    return is_capture(grid, s.prey, s.predator.position) ? Status::captured : Status::running;
}

}  // namespace tlppo
