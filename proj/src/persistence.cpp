#include "bifiber/persistence.hpp"

#include <algorithm>
#include <stdexcept>

namespace bifiber {

namespace {

void add_column(RuPair& p, Index target, Index source) {
    p.r[static_cast<std::size_t>(target)] ^= p.r[static_cast<std::size_t>(source)];
    if (p.has_u) p.u[static_cast<std::size_t>(source)] ^= p.u[static_cast<std::size_t>(target)];
}

void set_low(RuPair& p, Index j) {
    auto& l = p.low[static_cast<std::size_t>(j)];
    if (l >= 0 && p.low_to_col[static_cast<std::size_t>(l)] == j) p.low_to_col[static_cast<std::size_t>(l)] = -1;
    l = p.r[static_cast<std::size_t>(j)].highest();
    if (l >= 0) p.low_to_col[static_cast<std::size_t>(l)] = j;
}

}  // namespace

RuPair reduce(const GF2Matrix& d, bool record_u) {
    RuPair p;
    p.rows = d.rows();
    p.cols = d.cols();
    p.has_u = record_u;
    const auto n = static_cast<std::size_t>(p.cols);
    p.r.reserve(n);
    for (Index j = 0; j < p.cols; ++j) p.r.push_back(to_bits(d.column(j), static_cast<std::size_t>(p.rows)));
    if (record_u) {
        p.u.assign(n, BitVector(n));
        for (std::size_t j = 0; j < n; ++j) p.u[j].set(j);
    }
    p.low.assign(n, -1);
    p.low_to_col.assign(static_cast<std::size_t>(p.rows), -1);
    for (Index j = 0; j < p.cols; ++j) {
        auto& col = p.r[static_cast<std::size_t>(j)];
        for (long l = col.highest(); l >= 0; l = col.highest()) {
            const long q = p.low_to_col[static_cast<std::size_t>(l)];
            if (q < 0) break;
            add_column(p, j, static_cast<Index>(q));
        }
        const long l = col.highest();
        p.low[static_cast<std::size_t>(j)] = l;
        if (l >= 0) p.low_to_col[static_cast<std::size_t>(l)] = j;
    }
    return p;
}

RuState reduce_state(const GF2Matrix& d1, const GF2Matrix& d2, bool record_u) {
    return {reduce(d1, record_u), reduce(d2, record_u)};
}

PairsEss pairs_ess(const RuState& state) {
    PairsEss out;
    for (Index j = 0; j < state.second.cols; ++j) {
        const long l = state.second.low[static_cast<std::size_t>(j)];
        if (l >= 0) out.pairs.emplace_back(static_cast<Index>(l), j);
    }
    for (Index j = 0; j < state.first.cols; ++j) {
        if (state.first.low[static_cast<std::size_t>(j)] >= 0) continue;
        if (static_cast<std::size_t>(j) < state.second.low_to_col.size() &&
            state.second.low_to_col[static_cast<std::size_t>(j)] >= 0)
            continue;
        out.ess.push_back(j);
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

std::vector<Interval1> barcode_from_ru(const std::vector<Rational>& grades1, const std::vector<Rational>& grades2,
                                       const RuState& state) {
    if (!std::is_sorted(grades1.begin(), grades1.end()) || !std::is_sorted(grades2.begin(), grades2.end()))
        throw std::invalid_argument("barcode_from_ru: grades must be non-decreasing");
    if (grades1.size() != static_cast<std::size_t>(state.first.cols) ||
        grades2.size() != static_cast<std::size_t>(state.second.cols))
        throw std::invalid_argument("barcode_from_ru: grade list size mismatch");
    auto pe = pairs_ess(state);
    std::vector<Interval1> out;
    for (auto [i, j] : pe.pairs)
        out.push_back({grades1[static_cast<std::size_t>(i)], grades2[static_cast<std::size_t>(j)]});
    for (Index i : pe.ess) out.push_back({grades1[static_cast<std::size_t>(i)], std::nullopt});
    std::sort(out.begin(), out.end(), [](const Interval1& a, const Interval1& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        if (!a.death || !b.death) return a.death.has_value() && !b.death.has_value();
        return *a.death < *b.death;
    });
    return out;
}

void swap_columns(RuPair& p, Index k) {
    if (k < 0 || k + 1 >= p.cols) throw std::out_of_range("swap_columns: index out of range");
    if (!p.has_u) throw std::logic_error("swap_columns: decomposition has no U");
    const auto a = static_cast<std::size_t>(k);
    const auto b = a + 1;
    if (p.u[a].test(b)) {
        add_column(p, k + 1, k);
        set_low(p, k + 1);
    }
    // Swap columns of R and conjugate U by the transposition.
    std::swap(p.r[a], p.r[b]);
    std::swap(p.u[a], p.u[b]);
    for (std::size_t i = 0; i <= b; ++i) p.u[i].swap_bits(a, b);
    for (auto j : {a, b}) {
        const long l = p.low[j];
        if (l >= 0 && p.low_to_col[static_cast<std::size_t>(l)] == static_cast<long>(j))
            p.low_to_col[static_cast<std::size_t>(l)] = -1;
    }
    std::swap(p.low[a], p.low[b]);
    for (auto j : {a, b})
        if (p.low[j] >= 0) p.low_to_col[static_cast<std::size_t>(p.low[j])] = static_cast<long>(j);
    if (p.low[a] >= 0 && p.low[a] == p.low[b]) {
        add_column(p, k + 1, k);
        p.low_to_col[static_cast<std::size_t>(p.low[a])] = k;
        p.low[b] = -1;
        set_low(p, k + 1);
    }
}

void swap_rows(RuPair& p, Index k) {
    if (k < 0 || k + 1 >= p.rows) throw std::out_of_range("swap_rows: index out of range");
    const auto ka = static_cast<std::size_t>(k);
    const long a = p.low_to_col[ka];
    const long b = p.low_to_col[ka + 1];
    const bool conflict = a >= 0 && b >= 0 && p.r[static_cast<std::size_t>(b)].test(ka);
    for (auto& col : p.r) col.swap_bits(ka, ka + 1);
    p.low_to_col[ka] = p.low_to_col[ka + 1] = -1;
    for (long j : {a, b})
        if (j >= 0) p.low[static_cast<std::size_t>(j)] = -1;
    if (conflict) {
        const auto earlier = static_cast<Index>(std::min(a, b));
        const auto later = static_cast<Index>(std::max(a, b));
        add_column(p, later, earlier);
    }
    for (long j : {a, b})
        if (j >= 0) set_low(p, static_cast<Index>(j));
}

void vineyard_transpose(RuState& state, Side side, Index k) {
    if (side == Side::Left) {
        swap_columns(state.first, k);
        if (state.second.rows > 0) swap_rows(state.second, k);
    } else {
        swap_columns(state.second, k);
    }
}

GF2Matrix r_matrix(const RuPair& p) {
    GF2Matrix m(p.rows, 0);
    for (const auto& c : p.r) m.append_column(c.ones());
    return m;
}

GF2Matrix u_matrix(const RuPair& p) {
    GF2Matrix m(p.cols, p.cols);
    std::vector<std::vector<Index>> cols(static_cast<std::size_t>(p.cols));
    for (Index i = 0; i < p.cols; ++i)
        for (Index j : p.u[static_cast<std::size_t>(i)].ones()) cols[static_cast<std::size_t>(j)].push_back(i);
    for (Index j = 0; j < p.cols; ++j) m.set_column(j, cols[static_cast<std::size_t>(j)]);
    return m;
}

std::string check_decomposition(const GF2Matrix& d, const RuPair& p) {
    if (d.rows() != p.rows || d.cols() != p.cols) return "shape mismatch";
    std::vector<long> seen(static_cast<std::size_t>(p.rows), -1);
    for (Index j = 0; j < p.cols; ++j) {
        const long l = p.r[static_cast<std::size_t>(j)].highest();
        if (l != p.low[static_cast<std::size_t>(j)]) return "stale low of column " + std::to_string(j);
        if (l < 0) continue;
        if (seen[static_cast<std::size_t>(l)] >= 0)
            return "columns " + std::to_string(seen[static_cast<std::size_t>(l)]) + " and " + std::to_string(j) +
                   " share pivot " + std::to_string(l);
        seen[static_cast<std::size_t>(l)] = j;
        if (p.low_to_col[static_cast<std::size_t>(l)] != j) return "stale pivot lookup for row " + std::to_string(l);
    }
    for (Index i = 0; i < p.rows; ++i)
        if (p.low_to_col[static_cast<std::size_t>(i)] >= 0 && seen[static_cast<std::size_t>(i)] < 0)
            return "pivot lookup points at a non-pivot row " + std::to_string(i);
    if (!p.has_u) return {};
    for (Index i = 0; i < p.cols; ++i) {
        const auto& row = p.u[static_cast<std::size_t>(i)];
        if (!row.test(static_cast<std::size_t>(i))) return "U has a zero diagonal entry";
        const auto ones = row.ones();
        if (!ones.empty() && ones.front() < i) return "U is not upper triangular";
    }
    if (!(multiply(r_matrix(p), u_matrix(p)) == d)) return "D != R*U";
    return {};
}

}  // namespace bifiber
