#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tlppo/grid.hpp"
#include "tlppo/predator.hpp"
#include "tlppo/rng.hpp"

namespace tlppo {

/// What the prey sees this tick: the predator cell when it is in line of sight.
struct Observation {
    std::optional<CellId> predator_seen;

    static Observation observe(const HexGrid& grid, CellId prey, CellId predator) {
        if (grid.visible(prey, predator)) return {predator};
        return {};
    }
    friend bool operator==(const Observation&, const Observation&) = default;
};

inline constexpr std::size_t kDefaultParticles = 1000;

/// Unweighted particle filter over the hidden predator state.
class Belief {
public:
    Belief() = default;
    Belief(std::vector<PredatorState> particles, std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::span<const PredatorState> particles() const { return particles_; }
    std::size_t depletions() const { return depletions_; }
    bool empty() const { return particles_.empty(); }

    /// Uniform draw from the particle multiset.
    const PredatorState& sample(Rng& rng) const { return particles_[uniform_index(rng, particles_.size())]; }

    /// Conditions on an observation taken from `prey_pos` without advancing time.
    void condition(CellId prey_pos, const Observation& obs, const HexGrid& grid, Rng& rng);

    /// Advances each particle one generative step against `prey_pos`, then conditions.
    void update(CellId prey_pos, const Observation& obs, const HexGrid& grid, Rng& rng);

    /// True when every particle agrees with `obs` as seen from `prey_pos`.
    bool consistent_with(CellId prey_pos, const Observation& obs, const HexGrid& grid) const;

private:
    std::vector<PredatorState> particles_;
    std::vector<PredatorState> scratch_;
    std::size_t capacity_ = 0;
    std::size_t depletions_ = 0;
};

/// K independent draws from the spawn distribution (empty route and memory).
Belief init_belief(const HexGrid& grid, CellId prey_entry, std::size_t k, Rng& rng);

inline Belief update_belief(Belief b, CellId prey_pos, const Observation& obs, const HexGrid& grid, Rng& rng) {
    b.update(prey_pos, obs, grid, rng);
    return b;
}

inline PredatorState sample_state(const Belief& b, Rng& rng) { return b.sample(rng); }

/// Histogram of particle positions indexed by CellId, normalized to 1.
std::vector<double> position_marginal(const Belief& b, const HexGrid& grid);

}  // namespace tlppo
