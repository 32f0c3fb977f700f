#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlppo/grid.hpp"

namespace tlppo {

class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Per-cell eigencentrality indexed by CellId. Occluded cells and free cells
/// outside the start-gate component hold 0.
struct CentralityField {
    std::vector<double> values;
    double eigenvalue = 0.0;
    std::size_t iterations = 0;
};

struct DerivativeProductField {
    std::vector<double> values;
};

/// Locations where planning pays off.
struct LppoSet {
    std::vector<CellId> locations;  // ascending
    double threshold = 0.0;
    /// Set when the derivative field has no positive value (nothing to threshold).
    bool all_zero = false;

    bool contains(CellId c) const;
};

struct PowerIterationOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 10'000;
};

/// Principal eigenvector of the free-cell adjacency matrix (start-gate
/// component), nonnegative with unit Euclidean norm.
/// Throws NumericError when the iteration cap is hit.
CentralityField eigencentrality(const HexGrid& grid, const PowerIterationOptions& opts = {});

/// Product over the six hex directions of |EC(neighbor) - EC(cell)|, with
/// occluded or out-of-bounds neighbors counted as EC = 0. Occluded cells get 0.
DerivativeProductField derivative_product(const CentralityField& field, const HexGrid& grid);

/// Linear-interpolated percentile (0..100) of a sample.
double percentile_of(std::vector<double> sample, double percentile);

/// Threshold at the given percentile of the strictly positive products.
/// Throws std::invalid_argument unless 0 < percentile < 100.
LppoSet extract_lppo(const DerivativeProductField& dfield, double percentile);
LppoSet extract_lppo_at(const DerivativeProductField& dfield, double threshold);

inline constexpr double kDefaultLppoPercentile = 95.0;

struct LppoAnalysis {
    CentralityField centrality;
    DerivativeProductField dprod;
    LppoSet lppo;
};

LppoAnalysis analyze_connectivity(const HexGrid& grid, double percentile = kDefaultLppoPercentile);
LppoSet lppo_pipeline(const HexGrid& grid, double percentile = kDefaultLppoPercentile);

/// `coord,ec,dprod,is_lppo` rows, one per cell (occluded cells included with zeros).
void write_analysis_csv(std::ostream& os, const HexGrid& grid, const LppoAnalysis& a);

enum class MapLayer { centrality, dprod, lppo };

/// Plain-text PGM (P2) matrix over axial (row = r, column = q) coordinates.
/// Cells outside the arena are 0. For the lppo layer: occluded 64, free 160, LPPO 255.
void write_map_pgm(std::ostream& os, const HexGrid& grid, const LppoAnalysis& a, MapLayer layer);

}  // namespace tlppo
