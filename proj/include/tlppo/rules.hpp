#pragma once

#include "tlppo/grid.hpp"
#include "tlppo/predator.hpp"
#include "tlppo/rng.hpp"

namespace tlppo {

inline constexpr double kCaptureRadiusCells = 2.5;

/// Strictly closer than the capture radius (center-to-center, cell units).
inline bool is_capture(const HexGrid& grid, CellId prey, CellId predator) {
    return grid.distance_sq_cells(prey, predator) < kCaptureRadiusCells * kCaptureRadiusCells;
}

enum class Status { running, captured, reached_goal };

struct JointState {
    CellId prey = kNoCell;
    PredatorState predator;
};

/// Status of a joint state as observed at a tick boundary (capture before goal).
Status evaluate(const HexGrid& grid, const JointState& s);

/// One world tick: prey moves to `prey_next`, capture then goal are checked,
/// then the predator steps and capture is checked again.
Status advance_tick(const HexGrid& grid, JointState& s, CellId prey_next, Rng& rng);

}  // namespace tlppo
