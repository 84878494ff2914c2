// RU-decompositions over GF(2) and vineyard transpositions.

#pragma once

#include "bifiber/gf2.hpp"
#include "bifiber/rational.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bifiber {

/// D = R * U with R reduced and U upper unitriangular. R is stored as dense
/// columns, U as dense rows.
struct RuPair {
    Index rows = 0;
    Index cols = 0;
    std::vector<BitVector> r;        // cols entries, each of length rows
    std::vector<BitVector> u;        // cols rows, each of length cols; empty when !has_u
    std::vector<long> low;           // per column, -1 for zero columns
    std::vector<long> low_to_col;    // per row, -1 when no column has that pivot
    bool has_u = false;

    bool r_entry(Index i, Index j) const { return r[static_cast<std::size_t>(j)].test(static_cast<std::size_t>(i)); }
    bool u_entry(Index i, Index j) const { return u[static_cast<std::size_t>(i)].test(static_cast<std::size_t>(j)); }
};

/// Left-to-right column reduction. With record_u false, U is not maintained
/// (pairs only).
RuPair reduce(const GF2Matrix& d, bool record_u = true);

struct RuState {
    RuPair first;   // for D1
    RuPair second;  // for D2
};

RuState reduce_state(const GF2Matrix& d1, const GF2Matrix& d2, bool record_u = true);

struct PairsEss {
    std::vector<std::pair<Index, Index>> pairs;  // (generator column, relation column)
    std::vector<Index> ess;
};

PairsEss pairs_ess(const RuState& state);

struct Interval1 {
    Rational birth;
    std::optional<Rational> death;

    friend bool operator==(const Interval1&, const Interval1&) = default;
};

/// One interval per pair and one infinite interval per essential class,
/// sorted by (birth, death). Empty intervals are kept. The grade lists must
/// be non-decreasing; throws std::invalid_argument otherwise.
std::vector<Interval1> barcode_from_ru(const std::vector<Rational>& grades1, const std::vector<Rational>& grades2,
                                       const RuState& state);

/// Repairs the decomposition after swapping columns k and k+1 of D.
/// Requires U.
void swap_columns(RuPair& p, Index k);

/// Repairs the decomposition after swapping rows k and k+1 of D.
void swap_rows(RuPair& p, Index k);

enum class Side { Left, Right };

/// Left: columns k, k+1 of D1 and rows k, k+1 of D2. Right: columns k, k+1
/// of D2.
void vineyard_transpose(RuState& state, Side side, Index k);

GF2Matrix r_matrix(const RuPair& p);
GF2Matrix u_matrix(const RuPair& p);

/// Empty string if D = R*U, R is reduced and U is unit upper triangular;
/// otherwise a description of the first failure.
std::string check_decomposition(const GF2Matrix& d, const RuPair& p);

}  // namespace bifiber
