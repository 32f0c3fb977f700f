#include "tlppo/hex.hpp"

#include <cmath>

namespace tlppo {

namespace {
constexpr double kHalfSqrt3 = 0.86602540378443864676;
}

Point2 hex_center(HexCoord c) {
    return {kHalfSqrt3 * c.q, c.r + 0.5 * c.q};
}

HexCoord hex_containing(Point2 p) {
    const double fq = p.x / kHalfSqrt3;
    const double fr = p.y - 0.5 * fq;
    const double fs = -fq - fr;
    double rq = std::round(fq);
    double rr = std::round(fr);
    const double rs = std::round(fs);
    const double dq = std::abs(rq - fq);
    const double dr = std::abs(rr - fr);
    const double ds = std::abs(rs - fs);
    if (dq > dr && dq > ds) {
        rq = -rr - rs;
    } else if (dr > ds) {
        rr = -rq - rs;
    }
    return {static_cast<int>(rq), static_cast<int>(rr)};
}

const char* move_name(Move m) {
    switch (m) {
        case Move::d0: return "d0";
        case Move::d1: return "d1";
        case Move::d2: return "d2";
        case Move::d3: return "d3";
        case Move::d4: return "d4";
        case Move::d5: return "d5";
        case Move::stay: return "stay";
    }
    return "?";
}

}  // namespace tlppo
