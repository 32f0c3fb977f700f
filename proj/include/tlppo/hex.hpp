#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace tlppo {

/// Axial coordinate of a flat-top hexagonal cell.
struct HexCoord {
    int q = 0;
    int r = 0;

    friend constexpr auto operator<=>(const HexCoord&, const HexCoord&) = default;
    friend constexpr HexCoord operator+(HexCoord a, HexCoord b) { return {a.q + b.q, a.r + b.r}; }
    friend constexpr HexCoord operator-(HexCoord a, HexCoord b) { return {a.q - b.q, a.r - b.r}; }
};

inline std::ostream& operator<<(std::ostream& os, HexCoord c) {
    return os << '(' << c.q << ',' << c.r << ')';
}

// Six unit axial offsets, counter-clockwise starting at the lower-right edge
// of a flat-top hexagon.
inline constexpr std::array<HexCoord, 6> kHexDirections{{
    {+1, 0}, {+1, -1}, {0, -1}, {-1, 0}, {-1, +1}, {0, +1},
}};

/// Number of axial steps between two cells on an unobstructed lattice.
constexpr int hex_distance(HexCoord a, HexCoord b) {
    const int dq = a.q - b.q;
    const int dr = a.r - b.r;
    const int ds = -dq - dr;
    const int aq = dq < 0 ? -dq : dq;
    const int ar = dr < 0 ? -dr : dr;
    const int as = ds < 0 ? -ds : ds;
    return (aq + ar + as) / 2;
}

/// Cell center in cell units (adjacent centers are exactly 1 apart).
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

Point2 hex_center(HexCoord c);

/// Cell whose hexagon contains the point (cube rounding).
HexCoord hex_containing(Point2 p);

/// Primitive prey action: one of the six neighbor moves or staying put.
enum class Move : std::uint8_t { d0 = 0, d1, d2, d3, d4, d5, stay };

inline constexpr std::size_t kMoveCount = 7;

constexpr Move move_from_index(std::size_t i) { return static_cast<Move>(i); }
constexpr std::size_t move_index(Move m) { return static_cast<std::size_t>(m); }

const char* move_name(Move m);

}  // namespace tlppo

template <>
struct std::hash<tlppo::HexCoord> {
    std::size_t operator()(const tlppo::HexCoord& c) const noexcept {
        return std::hash<std::int64_t>{}((static_cast<std::int64_t>(c.q) << 32) ^
                                         static_cast<std::uint32_t>(c.r));
    }
};
