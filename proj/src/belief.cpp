#include "tlppo/belief.hpp"

#include "tlppo/rules.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <stdexcept>

namespace tlppo {

namespace {

// A hidden predator is also outside the capture radius, otherwise the episode would be over.
bool hidden_and_free(const HexGrid& grid, CellId prey_pos, CellId predator) {
    return !grid.visible(prey_pos, predator) && !is_capture(grid, prey_pos, predator);
}

}  // namespace

Belief::Belief(std::vector<PredatorState> particles, std::size_t capacity)
    : particles_(std::move(particles)), capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("Belief: capacity must be at least 1");
}

Belief init_belief(const HexGrid& grid, CellId prey_entry, std::size_t k, Rng& rng) {
    if (k == 0) throw std::invalid_argument("init_belief: K must be at least 1");
    const auto candidates = spawn_candidates(grid, prey_entry);
    if (candidates.empty()) throw SpawnError("init_belief: empty spawn region");
    std::vector<PredatorState> particles;
    particles.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        particles.push_back({candidates[uniform_index(rng, candidates.size())], kNoCell, kNoCell});
    }
    return Belief(std::move(particles), k);
}

void Belief::condition(CellId prey_pos, const Observation& obs, const HexGrid& grid, Rng& rng) {
    scratch_.clear();
    if (obs.predator_seen) {
        // Position is known exactly; each particle keeps its own route/memory guess.
        for (auto& p : particles_) p.position = *obs.predator_seen;
        assert(consistent_with(prey_pos, obs, grid));
        return;
    } else {
        for (const auto& p : particles_) {
            if (hidden_and_free(grid, prey_pos, p.position)) scratch_.push_back(p);
        }
        if (scratch_.empty()) {
            ++depletions_;
            std::vector<CellId> hidden;
            for (CellId c : grid.hidden_from(prey_pos)) {
                if (!is_capture(grid, prey_pos, c)) hidden.push_back(c);
            }
            if (hidden.empty()) throw std::logic_error("Belief: no free cell is consistent with the observation");
            particles_.clear();
            for (std::size_t i = 0; i < capacity_; ++i) {
                particles_.push_back({hidden[uniform_index(rng, hidden.size())], kNoCell, kNoCell});
            }
            return;
        }
    }

    if (scratch_.size() == capacity_) {
        particles_.swap(scratch_);
    } else {
        // Systematic resampling: survivors have equal weight, so each is copied
        // floor or ceil of K / survivors times, with one uniform offset.
        particles_.clear();
        const double step = static_cast<double>(scratch_.size()) / static_cast<double>(capacity_);
        const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        for (std::size_t i = 0; i < capacity_; ++i) {
            const auto j = static_cast<std::size_t>((static_cast<double>(i) + offset) * step);
            particles_.push_back(scratch_[std::min(j, scratch_.size() - 1)]);
        }
    }
    assert(consistent_with(prey_pos, obs, grid));
}

void Belief::update(CellId prey_pos, const Observation& obs, const HexGrid& grid, Rng& rng) {
    for (auto& p : particles_) p = generative_step(p, prey_pos, grid, rng);
    condition(prey_pos, obs, grid, rng);
}

bool Belief::consistent_with(CellId prey_pos, const Observation& obs, const HexGrid& grid) const {
    if (particles_.size() != capacity_) return false;
    for (const auto& p : particles_) {
        if (grid.is_occluded(p.position)) return false;
        if (obs.predator_seen ? p.position != *obs.predator_seen : !hidden_and_free(grid, prey_pos, p.position)) {
            return false;
        }
    }
    return true;
}

std::vector<double> position_marginal(const Belief& b, const HexGrid& grid) {
    std::vector<double> out(grid.cell_count(), 0.0);
    const double w = 1.0 / static_cast<double>(b.particles().size());
    for (const auto& p : b.particles()) out[static_cast<std::size_t>(p.position)] += w;
    return out;
}

}  // namespace tlppo
