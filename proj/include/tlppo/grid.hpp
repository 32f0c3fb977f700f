#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlppo/hex.hpp"

namespace tlppo {

/// Dense index of a cell inside a HexGrid. Indices follow lexicographic (q, r) order.
using CellId = std::int32_t;
inline constexpr CellId kNoCell = -1;

class WorldError : public std::runtime_error {
public:
    enum class Kind { malformed, not_hexagonal, endpoint_occluded, disconnected };

    WorldError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class NoPathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed contents of a world file, before validation.
struct WorldSpec {
    double cell_spacing_m = 0.11;
    double long_diagonal_m = 0.0;
    int radius = 0;
    std::vector<HexCoord> excluded;
    std::vector<HexCoord> occlusions;
    HexCoord start_gate;
    HexCoord goal;
};

WorldSpec parse_world_spec(const std::string& json_text);
WorldSpec load_world_spec(const std::filesystem::path& file);
std::string world_spec_to_json(const WorldSpec& spec);

struct Path {
    std::vector<HexCoord> steps;

    std::size_t size() const { return steps.size(); }
    /// Number of moves (steps - 1).
    std::size_t length() const { return steps.empty() ? 0 : steps.size() - 1; }
};

/// Immutable arena: cells, occlusions, and the lookup tables the planners
/// query in their inner loops (adjacency, visibility, hop distances).
class HexGrid {
public:
    static constexpr std::uint16_t kUnreachable = 0xffff;

    explicit HexGrid(const WorldSpec& spec);

    std::size_t cell_count() const { return coords_.size(); }
    std::size_t free_count() const { return free_cells_.size(); }
    double cell_spacing_m() const { return spacing_m_; }
    double long_diagonal_m() const { return diagonal_m_; }
    int radius() const { return radius_; }

    HexCoord coord(CellId id) const { return coords_[static_cast<std::size_t>(id)]; }
    std::span<const HexCoord> coords() const { return coords_; }
    /// kNoCell when the coordinate is outside the arena.
    CellId find(HexCoord c) const;
    /// Throws std::out_of_range when the coordinate is outside the arena.
    CellId id(HexCoord c) const;
    bool contains(HexCoord c) const { return find(c) != kNoCell; }

    bool is_occluded(CellId id) const { return occluded_[static_cast<std::size_t>(id)] != 0; }
    bool is_free(CellId id) const { return !is_occluded(id); }
    std::span<const CellId> free_cells() const { return free_cells_; }
    std::vector<HexCoord> occlusions() const;

    CellId start_gate() const { return start_; }
    CellId goal() const { return goal_; }

    /// Neighbor in a given direction (occluded or not), kNoCell out of bounds.
    CellId neighbor(CellId id, std::size_t direction) const {
        return neighbor_table_[static_cast<std::size_t>(id) * 6 + direction];
    }
    /// Adjacent free cells.
    std::span<const CellId> free_neighbors(CellId id) const;
    /// Destination of a prey move; kNoCell when the move is illegal.
    CellId apply(CellId from, Move m) const;
    /// The move taking `from` to the adjacent (or identical) cell `to`.
    std::optional<Move> move_between(CellId from, CellId to) const;

    bool visible(CellId a, CellId b) const {
        const auto bit = static_cast<std::size_t>(a) * cell_count() + static_cast<std::size_t>(b);
        return (visibility_[bit >> 6] >> (bit & 63)) & 1u;
    }
    /// Free cells not visible from `id`.
    std::span<const CellId> hidden_from(CellId id) const;

    /// Breadth-first hop count through free cells.
    std::uint16_t hops(CellId a, CellId b) const {
        return hops_[static_cast<std::size_t>(a) * cell_count() + static_cast<std::size_t>(b)];
    }
    /// First cell after `from` on the canonical shortest route to `to`.
    /// Returns `from` when already there, kNoCell when unreachable.
    CellId next_hop(CellId from, CellId to) const;

    /// Squared center distance in cell units.
    double distance_sq_cells(CellId a, CellId b) const;

    /// Samples the center-to-center segment at 0.1-cell steps; blocked when a
    /// sample lands in an occluded hexagon other than the endpoints' own.
    bool sampled_visibility(CellId a, CellId b) const;

private:
    void build_tables();

    double spacing_m_;
    double diagonal_m_;
    int radius_;
    std::vector<HexCoord> coords_;
    std::vector<Point2> centers_;
    std::vector<CellId> lookup_;  // (2R+1)^2 dense axial lookup
    std::vector<std::uint8_t> occluded_;
    std::vector<CellId> free_cells_;
    CellId start_ = kNoCell;
    CellId goal_ = kNoCell;
    std::vector<CellId> neighbor_table_;
    std::vector<std::uint32_t> free_nbr_offsets_;
    std::vector<CellId> free_nbrs_;
    std::vector<std::uint64_t> visibility_;
    std::vector<std::uint32_t> hidden_offsets_;
    std::vector<CellId> hidden_;
    std::vector<std::uint16_t> hops_;
};

/// Validates a spec and builds the grid. Throws WorldError.
HexGrid build_grid(const WorldSpec& spec);
HexGrid load_grid(const std::filesystem::path& file);

/// Adjacent free cells of `c`. Throws std::out_of_range when `c` is not in the grid.
std::vector<HexCoord> neighbors(const HexGrid& grid, HexCoord c);

/// Visibility between two cell centers. Uses the grid's precomputed table.
bool line_of_sight(const HexGrid& grid, HexCoord a, HexCoord b);

/// Sampled center-to-center visibility test (0.1-cell steps, point-in-hexagon
/// against occluded cells). This is what the visibility table is built from.
bool sample_line_of_sight(const HexGrid& grid, HexCoord a, HexCoord b);

/// A* shortest path with axial-distance heuristic; ties on f broken by (q, r).
/// Throws NoPathError if `b` is unreachable.
Path shortest_path(const HexGrid& grid, HexCoord a, HexCoord b);
std::vector<CellId> shortest_path_ids(const HexGrid& grid, CellId a, CellId b);

double distance_cells(const HexGrid& grid, HexCoord a, HexCoord b);
double distance_m(const HexGrid& grid, HexCoord a, HexCoord b);

}  // namespace tlppo
