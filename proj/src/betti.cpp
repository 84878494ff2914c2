#include "bifiber/betti.hpp"

#include <algorithm>
#include <optional>

namespace bifiber {

namespace {

std::size_t sum_dim(std::initializer_list<const Gf2Basis*> parts, std::size_t ambient) {
    Gf2Basis sum(ambient);
    for (const auto* p : parts)
        for (const auto& v : p->vectors()) sum.insert(v);
    return sum.dim();
}

}  // namespace

GradeSlice grade_slice_basis(const GridFIRep& rep, GridPoint a) {
    const auto m1 = static_cast<std::size_t>(rep.m1());
    const auto m0 = static_cast<std::size_t>(rep.m0);
    GradeSlice out{Gf2Basis(m1), Gf2Basis(m1)};

    // Column reduction of D1 tracking the combination of generators.
    std::vector<BitVector> image;
    std::vector<BitVector> combo;
    std::vector<long> pivot(m0, -1);
    for (Index j = 0; j < rep.m1(); ++j) {
        if (!leq(rep.gr1[static_cast<std::size_t>(j)], a)) continue;
        BitVector v = to_bits(rep.d1.column(j), m0);
        BitVector c(m1);
        c.set(static_cast<std::size_t>(j));
        for (long h = v.highest(); h >= 0 && pivot[static_cast<std::size_t>(h)] >= 0; h = v.highest()) {
            const auto p = static_cast<std::size_t>(pivot[static_cast<std::size_t>(h)]);
            v ^= image[p];
            c ^= combo[p];
        }
        const long h = v.highest();
        if (h < 0) {
            out.cycles.insert(std::move(c));
        } else {
            pivot[static_cast<std::size_t>(h)] = static_cast<long>(image.size());
            image.push_back(std::move(v));
            combo.push_back(std::move(c));
        }
    }
    for (Index j = 0; j < rep.m2(); ++j)
        if (leq(rep.gr2[static_cast<std::size_t>(j)], a)) out.boundaries.insert(to_bits(rep.d2.column(j), m1));
    return out;
}

DimGrid dimension_function(const GridFIRep& rep) {
    DimGrid d{rep.grid, {}};
    d.dims.assign(static_cast<std::size_t>(rep.grid.nx() * rep.grid.ny()), 0);
    for (int y = 0; y < rep.grid.ny(); ++y)
        for (int x = 0; x < rep.grid.nx(); ++x)
            d.dims[static_cast<std::size_t>(y * rep.grid.nx() + x)] = static_cast<int>(grade_slice_basis(rep, {x, y}).dim());
    return d;
}

BettiTable betti_numbers(const GridFIRep& rep, DimGrid* dims_out) {
    const int nx = rep.grid.nx();
    const int ny = rep.grid.ny();
    const auto m1 = static_cast<std::size_t>(rep.m1());
    BettiTable table{rep.grid, {}, {}, {}};
    DimGrid dims{rep.grid, std::vector<int>(static_cast<std::size_t>(nx * ny), 0)};

    // Only the current and previous rows of slices are kept.
    std::vector<std::optional<GradeSlice>> prev(static_cast<std::size_t>(nx)), cur(static_cast<std::size_t>(nx));
    const Gf2Basis empty(m1);
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            cur[static_cast<std::size_t>(x)] = grade_slice_basis(rep, {x, y});
            const GradeSlice& z = *cur[static_cast<std::size_t>(x)];
            const GradeSlice* a = x > 0 ? &*cur[static_cast<std::size_t>(x - 1)] : nullptr;
            const GradeSlice* b = y > 0 ? &*prev[static_cast<std::size_t>(x)] : nullptr;
            const GradeSlice* c = (x > 0 && y > 0) ? &*prev[static_cast<std::size_t>(x - 1)] : nullptr;

            const std::size_t dim_z = z.dim();
            const std::size_t dim_a = a ? a->dim() : 0;
            const std::size_t dim_b = b ? b->dim() : 0;
            const std::size_t dim_c = c ? c->dim() : 0;

            const Gf2Basis& za = a ? a->cycles : empty;
            const Gf2Basis& zb = b ? b->cycles : empty;
            const Gf2Basis& ba = a ? a->boundaries : empty;
            const Gf2Basis& bb = b ? b->boundaries : empty;
            const std::size_t dim_bc = c ? c->boundaries.dim() : 0;

            const std::size_t rank2 = sum_dim({&za, &zb, &z.boundaries}, m1) - z.boundaries.dim();
            // B_a and B_b lie in the coordinates at grade <= a and <= b, so
            // their intersection already lies in those at grade <= c.
            const std::size_t inter = ba.dim() + bb.dim() - sum_dim({&ba, &bb}, m1);
            const std::size_t xi2 = inter - dim_bc;
            const std::size_t rank1 = dim_c - xi2;
            const std::size_t xi0 = dim_z - rank2;
            const std::size_t xi1 = dim_a + dim_b - rank1 - rank2;

            const GridPoint p{x, y};
            dims.dims[static_cast<std::size_t>(y * nx + x)] = static_cast<int>(dim_z);
            if (xi0) table.xi0[p] = static_cast<int>(xi0);
            if (xi1) table.xi1[p] = static_cast<int>(xi1);
            if (xi2) table.xi2[p] = static_cast<int>(xi2);
        }
        std::swap(prev, cur);
    }
    if (dims_out) *dims_out = std::move(dims);
    return table;
}

std::vector<GridPoint> support_points(const BettiTable& betti) {
    std::vector<GridPoint> s;
    for (const auto& [p, v] : betti.xi0) s.push_back(p);
    for (const auto& [p, v] : betti.xi1) s.push_back(p);
    std::sort(s.begin(), s.end(), [](GridPoint a, GridPoint b) { return colex_less(a, b); });
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

std::vector<Bigrade> support_set(const BettiTable& betti) {
    std::vector<Bigrade> out;
    for (auto p : support_points(betti)) out.push_back(betti.grid.at(p));
    return out;
}

}  // namespace bifiber
