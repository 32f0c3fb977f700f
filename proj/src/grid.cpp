#include "tlppo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <queue>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace tlppo {

namespace {

using nlohmann::json;

HexCoord parse_coord(const json& j, const char* field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw WorldError(WorldError::Kind::malformed,
                         std::string("world spec: '") + field + "' must be an integer pair [q, r]");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<HexCoord> parse_coord_list(const json& j, const char* field) {
    if (!j.is_array()) {
        throw WorldError(WorldError::Kind::malformed,
                         std::string("world spec: '") + field + "' must be a list of [q, r] pairs");
    }
    std::vector<HexCoord> out;
    out.reserve(j.size());
    for (const auto& item : j) out.push_back(parse_coord(item, field));
    return out;
}

bool in_hex_region(HexCoord c, int radius) {
    return hex_distance(c, {0, 0}) <= radius;
}

}  // namespace

WorldSpec parse_world_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw WorldError(WorldError::Kind::malformed, std::string("world spec: ") + e.what());
    }
    if (!j.is_object()) throw WorldError(WorldError::Kind::malformed, "world spec: top level must be an object");

    WorldSpec spec;
    try {
        spec.cell_spacing_m = j.at("cell_spacing_m").get<double>();
        spec.long_diagonal_m = j.value("long_diagonal_m", 0.0);
        const auto& cells = j.at("cells");
        if (cells.is_number_integer()) {
            spec.radius = cells.get<int>();
        } else if (cells.is_object()) {
            spec.radius = cells.at("radius").get<int>();
            if (cells.contains("exclude")) spec.excluded = parse_coord_list(cells["exclude"], "cells.exclude");
        } else {
            throw WorldError(WorldError::Kind::malformed, "world spec: 'cells' must be a radius or {radius, exclude}");
        }
        spec.occlusions = parse_coord_list(j.value("occlusions", json::array()), "occlusions");
        spec.start_gate = parse_coord(j.at("start_gate"), "start_gate");
        spec.goal = parse_coord(j.at("goal"), "goal");
    } catch (const json::exception& e) {
        throw WorldError(WorldError::Kind::malformed, std::string("world spec: ") + e.what());
    }
    return spec;
}

WorldSpec load_world_spec(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw WorldError(WorldError::Kind::malformed, "cannot open world file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_world_spec(ss.str());
}

std::string world_spec_to_json(const WorldSpec& spec) {
    auto pairs = [](const std::vector<HexCoord>& v) {
        json a = json::array();
        for (auto c : v) a.push_back({c.q, c.r});
        return a;
    };
    json j;
    j["cell_spacing_m"] = spec.cell_spacing_m;
    j["long_diagonal_m"] = spec.long_diagonal_m;
    j["cells"] = {{"radius", spec.radius}, {"exclude", pairs(spec.excluded)}};
    j["occlusions"] = pairs(spec.occlusions);
    j["start_gate"] = {spec.start_gate.q, spec.start_gate.r};
    j["goal"] = {spec.goal.q, spec.goal.r};
    return j.dump(2);
}

HexGrid::HexGrid(const WorldSpec& spec)
    : spacing_m_(spec.cell_spacing_m), diagonal_m_(spec.long_diagonal_m), radius_(spec.radius) {
    if (!(spec.cell_spacing_m > 0.0)) {
        throw WorldError(WorldError::Kind::malformed, "world spec: cell_spacing_m must be positive");
    }
    if (spec.radius < 0) throw WorldError(WorldError::Kind::not_hexagonal, "world spec: negative radius");

    std::vector<HexCoord> excluded = spec.excluded;
    std::sort(excluded.begin(), excluded.end());
    for (auto c : excluded) {
        if (!in_hex_region(c, radius_)) {
            throw WorldError(WorldError::Kind::not_hexagonal, "world spec: excluded cell outside hexagonal region");
        }
    }
    for (int q = -radius_; q <= radius_; ++q) {
        for (int r = -radius_; r <= radius_; ++r) {
            const HexCoord c{q, r};
            if (in_hex_region(c, radius_) && !std::binary_search(excluded.begin(), excluded.end(), c)) {
                coords_.push_back(c);
            }
        }
    }
    if (coords_.empty()) throw WorldError(WorldError::Kind::not_hexagonal, "world spec: no cells");

    const int side = 2 * radius_ + 1;
    lookup_.assign(static_cast<std::size_t>(side) * side, kNoCell);
    centers_.reserve(coords_.size());
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        const auto c = coords_[i];
        lookup_[static_cast<std::size_t>((c.q + radius_) * side + (c.r + radius_))] = static_cast<CellId>(i);
        centers_.push_back(hex_center(c));
    }

    occluded_.assign(coords_.size(), 0);
    for (auto c : spec.occlusions) {
        const CellId id = find(c);
        if (id == kNoCell) {
            std::ostringstream os;
            os << "world spec: occlusion " << c << " is outside the arena";
            throw WorldError(WorldError::Kind::malformed, os.str());
        }
        occluded_[static_cast<std::size_t>(id)] = 1;
    }

    start_ = find(spec.start_gate);
    goal_ = find(spec.goal);
    if (start_ == kNoCell || goal_ == kNoCell) {
        throw WorldError(WorldError::Kind::malformed, "world spec: start_gate/goal outside the arena");
    }
    if (is_occluded(start_) || is_occluded(goal_)) {
        throw WorldError(WorldError::Kind::endpoint_occluded, "world spec: start_gate or goal is occluded");
    }
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (!occluded_[i]) free_cells_.push_back(static_cast<CellId>(i));
    }

    build_tables();

    for (CellId c : free_cells_) {
        if (hops(start_, c) == kUnreachable) {
            std::ostringstream os;
            os << "world spec: free cell " << coord(c) << " is disconnected from the start gate";
            throw WorldError(WorldError::Kind::disconnected, os.str());
        }
    }
}

CellId HexGrid::find(HexCoord c) const {
    if (c.q < -radius_ || c.q > radius_ || c.r < -radius_ || c.r > radius_) return kNoCell;
    const int side = 2 * radius_ + 1;
    return lookup_[static_cast<std::size_t>((c.q + radius_) * side + (c.r + radius_))];
}

CellId HexGrid::id(HexCoord c) const {
    const CellId out = find(c);
    if (out == kNoCell) {
        std::ostringstream os;
        os << "cell " << c << " is not in the grid";
        throw std::out_of_range(os.str());
    }
    return out;
}

std::vector<HexCoord> HexGrid::occlusions() const {
    std::vector<HexCoord> out;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (occluded_[i]) out.push_back(coords_[i]);
    }
    return out;
}

std::span<const CellId> HexGrid::free_neighbors(CellId id) const {
    const auto i = static_cast<std::size_t>(id);
    return {free_nbrs_.data() + free_nbr_offsets_[i], free_nbr_offsets_[i + 1] - free_nbr_offsets_[i]};
}

std::span<const CellId> HexGrid::hidden_from(CellId id) const {
    const auto i = static_cast<std::size_t>(id);
    return {hidden_.data() + hidden_offsets_[i], hidden_offsets_[i + 1] - hidden_offsets_[i]};
}

CellId HexGrid::apply(CellId from, Move m) const {
    if (m == Move::stay) return from;
    const CellId to = neighbor(from, move_index(m));
    if (to == kNoCell || is_occluded(to)) return kNoCell;
    return to;
}

std::optional<Move> HexGrid::move_between(CellId from, CellId to) const {
    if (from == to) return Move::stay;
    for (std::size_t d = 0; d < 6; ++d) {
        if (neighbor(from, d) == to) return move_from_index(d);
    }
    return std::nullopt;
}

CellId HexGrid::next_hop(CellId from, CellId to) const {
    if (from == to) return from;
    const auto remaining = hops(from, to);
    if (remaining == kUnreachable) return kNoCell;
    for (CellId n : free_neighbors(from)) {
        if (hops(n, to) + 1 == remaining) return n;
    }
    return kNoCell;
}

double HexGrid::distance_sq_cells(CellId a, CellId b) const {
    const auto& pa = centers_[static_cast<std::size_t>(a)];
    const auto& pb = centers_[static_cast<std::size_t>(b)];
    const double dx = pa.x - pb.x;
    const double dy = pa.y - pb.y;
    return dx * dx + dy * dy;
}

bool HexGrid::sampled_visibility(CellId a, CellId b) const {
    if (a == b) return true;
    const auto& pa = centers_[static_cast<std::size_t>(a)];
    const auto& pb = centers_[static_cast<std::size_t>(b)];
    const double len = std::sqrt(distance_sq_cells(a, b));
    const int samples = static_cast<int>(std::ceil(len / 0.1));
    const HexCoord ca = coord(a);
    const HexCoord cb = coord(b);
    for (int i = 1; i < samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        const HexCoord h = hex_containing({pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y)});
        if (h == ca || h == cb) continue;
        const CellId hid = find(h);
        if (hid != kNoCell && is_occluded(hid)) return false;
    }
    return true;
}

void HexGrid::build_tables() {
    const std::size_t n = coords_.size();

    neighbor_table_.assign(n * 6, kNoCell);
    free_nbr_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<CellId> fn;
        for (std::size_t d = 0; d < 6; ++d) {
            const CellId nb = find(coords_[i] + kHexDirections[d]);
            neighbor_table_[i * 6 + d] = nb;
            if (nb != kNoCell && !occluded_[static_cast<std::size_t>(nb)]) fn.push_back(nb);
        }
        std::sort(fn.begin(), fn.end());
        if (occluded_[i]) fn.clear();
        free_nbrs_.insert(free_nbrs_.end(), fn.begin(), fn.end());
        free_nbr_offsets_[i + 1] = static_cast<std::uint32_t>(free_nbrs_.size());
    }

    visibility_.assign((n * n + 63) / 64, 0);
    auto set_bit = [&](std::size_t a, std::size_t b) {
        const std::size_t bit = a * n + b;
        visibility_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
    };
    for (CellId a : free_cells_) {
        for (CellId b : free_cells_) {
            if (b < a) continue;
            if (sampled_visibility(a, b)) {
                set_bit(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
                set_bit(static_cast<std::size_t>(b), static_cast<std::size_t>(a));
            }
        }
    }

    hidden_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!occluded_[i]) {
            for (CellId b : free_cells_) {
                if (!visible(static_cast<CellId>(i), b)) hidden_.push_back(b);
            }
        }
        hidden_offsets_[i + 1] = static_cast<std::uint32_t>(hidden_.size());
    }

    hops_.assign(n * n, kUnreachable);
    std::vector<CellId> frontier;
    for (CellId src : free_cells_) {
        auto* row = hops_.data() + static_cast<std::size_t>(src) * n;
        row[src] = 0;
        frontier.assign(1, src);
        for (std::size_t head = 0; head < frontier.size(); ++head) {
            const CellId cur = frontier[head];
            for (CellId nb : free_neighbors(cur)) {
                if (row[nb] == kUnreachable) {
                    row[nb] = static_cast<std::uint16_t>(row[cur] + 1);
                    frontier.push_back(nb);
                }
            }
        }
    }
}

HexGrid build_grid(const WorldSpec& spec) { return HexGrid(spec); }

HexGrid load_grid(const std::filesystem::path& file) { return HexGrid(load_world_spec(file)); }

std::vector<HexCoord> neighbors(const HexGrid& grid, HexCoord c) {
    const CellId id = grid.id(c);
    std::vector<HexCoord> out;
    for (CellId n : grid.free_neighbors(id)) out.push_back(grid.coord(n));
    return out;
}

bool line_of_sight(const HexGrid& grid, HexCoord a, HexCoord b) {
    return grid.visible(grid.id(a), grid.id(b));
}

bool sample_line_of_sight(const HexGrid& grid, HexCoord a, HexCoord b) {
    return grid.sampled_visibility(grid.id(a), grid.id(b));
}

std::vector<CellId> shortest_path_ids(const HexGrid& grid, CellId a, CellId b) {
    if (grid.is_occluded(a) || grid.is_occluded(b)) throw NoPathError("shortest_path: endpoint is occluded");
    const std::size_t n = grid.cell_count();
    constexpr int kInf = 1 << 29;
    std::vector<int> g(n, kInf);
    std::vector<CellId> came_from(n, kNoCell);
    std::vector<std::uint8_t> closed(n, 0);
    // (f, id): ids are in lexicographic (q, r) order, so equal-f ties resolve by coordinate.
    using Entry = std::pair<int, CellId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    const HexCoord goal = grid.coord(b);
    g[static_cast<std::size_t>(a)] = 0;
    open.emplace(hex_distance(grid.coord(a), goal), a);
    while (!open.empty()) {
        const auto [f, cur] = open.top();
        open.pop();
        const auto ci = static_cast<std::size_t>(cur);
        if (closed[ci]) continue;
        closed[ci] = 1;
        if (cur == b) break;
        for (CellId nb : grid.free_neighbors(cur)) {
            const auto ni = static_cast<std::size_t>(nb);
            if (closed[ni]) continue;
            const int cand = g[ci] + 1;
            if (cand < g[ni]) {
                g[ni] = cand;
                came_from[ni] = cur;
                open.emplace(cand + hex_distance(grid.coord(nb), goal), nb);
            }
        }
    }
    if (!closed[static_cast<std::size_t>(b)]) {
        std::ostringstream os;
        os << "shortest_path: no path from " << grid.coord(a) << " to " << goal;
        throw NoPathError(os.str());
    }
    std::vector<CellId> out;
    for (CellId c = b; c != kNoCell; c = came_from[static_cast<std::size_t>(c)]) out.push_back(c);
    std::reverse(out.begin(), out.end());
    return out;
}

Path shortest_path(const HexGrid& grid, HexCoord a, HexCoord b) {
    Path p;
    for (CellId c : shortest_path_ids(grid, grid.id(a), grid.id(b))) p.steps.push_back(grid.coord(c));
    return p;
}

double distance_cells(const HexGrid& grid, HexCoord a, HexCoord b) {
    return std::sqrt(grid.distance_sq_cells(grid.id(a), grid.id(b)));
}

double distance_m(const HexGrid& grid, HexCoord a, HexCoord b) {
    return distance_cells(grid, a, b) * grid.cell_spacing_m();
}

}  // namespace tlppo
