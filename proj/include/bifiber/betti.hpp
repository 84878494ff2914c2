// Dimension function and bigraded Betti numbers of a discretized FI-rep.

#pragma once

#include "bifiber/gf2.hpp"
#include "bifiber/model.hpp"

#include <map>
#include <vector>

namespace bifiber {

struct DimGrid {
    Grid2 grid;
    std::vector<int> dims;  // row-major, index y * nx + x

    int at(GridPoint p) const { return dims[static_cast<std::size_t>(p.y * grid.nx() + p.x)]; }

    friend bool operator==(const DimGrid&, const DimGrid&) = default;
};

struct BettiTable {
    Grid2 grid;
    std::map<GridPoint, int> xi0;
    std::map<GridPoint, int> xi1;
    std::map<GridPoint, int> xi2;

    friend bool operator==(const BettiTable&, const BettiTable&) = default;
};

/// Cycles and boundaries of the FI-rep at one grid point, as subspaces of
/// GF(2)^m1.
struct GradeSlice {
    Gf2Basis cycles;      // ker D1 restricted to generators at grade <= a
    Gf2Basis boundaries;  // span of relations at grade <= a

    std::size_t dim() const { return cycles.dim() - boundaries.dim(); }
};

GradeSlice grade_slice_basis(const GridFIRep& rep, GridPoint a);

DimGrid dimension_function(const GridFIRep& rep);

/// Betti numbers by Koszul homology at each grid point.
BettiTable betti_numbers(const GridFIRep& rep, DimGrid* dims_out = nullptr);

/// supp xi0 union supp xi1, colexicographically sorted grid points.
std::vector<GridPoint> support_points(const BettiTable& betti);

/// Same, mapped through the grid.
std::vector<Bigrade> support_set(const BettiTable& betti);

}  // namespace bifiber
