#include "tlppo/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace tlppo {

bool LppoSet::contains(CellId c) const {
    return std::binary_search(locations.begin(), locations.end(), c);
}

CentralityField eigencentrality(const HexGrid& grid, const PowerIterationOptions& opts) {
    const std::size_t n = grid.cell_count();
    std::vector<CellId> members;
    for (CellId c : grid.free_cells()) {
        if (grid.hops(grid.start_gate(), c) != HexGrid::kUnreachable) members.push_back(c);
    }

    CentralityField out;
    out.values.assign(n, 0.0);
    const double init = 1.0 / std::sqrt(static_cast<double>(members.size()));
    for (CellId c : members) out.values[static_cast<std::size_t>(c)] = init;

    std::vector<double> next(n, 0.0);
    double delta = 0.0;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        double norm_sq = 0.0;
        for (CellId c : members) {
            double acc = 0.0;
            for (CellId nb : grid.free_neighbors(c)) acc += out.values[static_cast<std::size_t>(nb)];
            next[static_cast<std::size_t>(c)] = acc;
            norm_sq += acc * acc;
        }
        if (norm_sq == 0.0) {
            // Single isolated cell: the 1x1 zero matrix; the indicator vector is its eigenvector.
            out.eigenvalue = 0.0;
            out.iterations = it;
            return out;
        }
        const double inv = 1.0 / std::sqrt(norm_sq);
        delta = 0.0;
        for (CellId c : members) {
            const auto i = static_cast<std::size_t>(c);
            const double v = next[i] * inv;
            delta = std::max(delta, std::abs(v - out.values[i]));
            out.values[i] = v;
        }
        if (delta < opts.tolerance) {
            double num = 0.0;
            for (CellId c : members) {
                double acc = 0.0;
                for (CellId nb : grid.free_neighbors(c)) acc += out.values[static_cast<std::size_t>(nb)];
                num += acc * out.values[static_cast<std::size_t>(c)];
            }
            out.eigenvalue = num;  // Rayleigh quotient, v is unit norm
            out.iterations = it;
            return out;
        }
    }
    std::ostringstream os;
    os << "eigencentrality: power iteration did not converge in " << opts.max_iterations
       << " iterations (last step " << delta << ")";
    throw NumericError(os.str(), delta);
}

DerivativeProductField derivative_product(const CentralityField& field, const HexGrid& grid) {
    DerivativeProductField out;
    out.values.assign(grid.cell_count(), 0.0);
    for (CellId c : grid.free_cells()) {
        const double here = field.values[static_cast<std::size_t>(c)];
        double product = 1.0;
        for (std::size_t d = 0; d < 6; ++d) {
            const CellId nb = grid.neighbor(c, d);
            const double there =
                (nb == kNoCell || grid.is_occluded(nb)) ? 0.0 : field.values[static_cast<std::size_t>(nb)];
            product *= std::abs(there - here);
        }
        out.values[static_cast<std::size_t>(c)] = product;
    }
    return out;
}

double percentile_of(std::vector<double> sample, double percentile) {
    if (sample.empty()) throw std::invalid_argument("percentile_of: empty sample");
    std::sort(sample.begin(), sample.end());
    const double rank = percentile / 100.0 * static_cast<double>(sample.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, sample.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return sample[lo] + frac * (sample[hi] - sample[lo]);
}

LppoSet extract_lppo_at(const DerivativeProductField& dfield, double threshold) {
    LppoSet out;
    out.threshold = threshold;
    bool any_positive = false;
    for (std::size_t i = 0; i < dfield.values.size(); ++i) {
        const double v = dfield.values[i];
        if (v > 0.0) any_positive = true;
        if (v > 0.0 && v >= threshold) out.locations.push_back(static_cast<CellId>(i));
    }
    out.all_zero = !any_positive;
    return out;
}

LppoSet extract_lppo(const DerivativeProductField& dfield, double percentile) {
    if (!(percentile > 0.0 && percentile < 100.0)) {
        throw std::invalid_argument("extract_lppo: percentile must be in (0, 100)");
    }
    std::vector<double> positive;
    for (double v : dfield.values) {
        if (v > 0.0) positive.push_back(v);
    }
    if (positive.empty()) {
        LppoSet empty;
        empty.all_zero = true;
        return empty;
    }
    return extract_lppo_at(dfield, percentile_of(std::move(positive), percentile));
}

LppoAnalysis analyze_connectivity(const HexGrid& grid, double percentile) {
    LppoAnalysis a;
    a.centrality = eigencentrality(grid);
    a.dprod = derivative_product(a.centrality, grid);
    a.lppo = extract_lppo(a.dprod, percentile);
    return a;
}

LppoSet lppo_pipeline(const HexGrid& grid, double percentile) {
    return analyze_connectivity(grid, percentile).lppo;
}

void write_analysis_csv(std::ostream& os, const HexGrid& grid, const LppoAnalysis& a) {
    os << "coord,ec,dprod,is_lppo\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        const auto id = static_cast<CellId>(i);
        const auto c = grid.coord(id);
        os << c.q << ' ' << c.r << ',' << a.centrality.values[i] << ',' << a.dprod.values[i] << ','
           << (a.lppo.contains(id) ? 1 : 0) << '\n';
    }
}

void write_map_pgm(std::ostream& os, const HexGrid& grid, const LppoAnalysis& a, MapLayer layer) {
    const int radius = grid.radius();
    const int side = 2 * radius + 1;
    double max_value = 0.0;
    const auto& src = layer == MapLayer::centrality ? a.centrality.values : a.dprod.values;
    if (layer != MapLayer::lppo) {
        for (double v : src) max_value = std::max(max_value, v);
    }
    os << "P2\n" << side << ' ' << side << "\n255\n";
    for (int r = -radius; r <= radius; ++r) {
        for (int q = -radius; q <= radius; ++q) {
            const CellId id = grid.find({q, r});
            int px = 0;
            if (id != kNoCell) {
                if (layer == MapLayer::lppo) {
                    px = grid.is_occluded(id) ? 64 : (a.lppo.contains(id) ? 255 : 160);
                } else if (max_value > 0.0) {
                    px = static_cast<int>(std::lround(255.0 * src[static_cast<std::size_t>(id)] / max_value));
                }
            }
            os << px << (q == radius ? '\n' : ' ');
        }
    }
}

}  // namespace tlppo
