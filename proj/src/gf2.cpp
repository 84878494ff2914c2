#include "bifiber/gf2.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bifiber {

namespace {

std::vector<Index> normalize_column(std::vector<Index> entries) {
    std::sort(entries.begin(), entries.end());
    std::vector<Index> out;
    out.reserve(entries.size());
    for (Index e : entries) {
        if (!out.empty() && out.back() == e)
            out.pop_back();
        else
            out.push_back(e);
    }
    return out;
}

// Symmetric difference of two sorted lists.
std::vector<Index> add_columns(const std::vector<Index>& a, const std::vector<Index>& b) {
    std::vector<Index> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            out.push_back(a[i++]);
        else if (b[j] < a[i])
            out.push_back(b[j++]);
        else {
            ++i;
            ++j;
        }
    }
    out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(i), a.end());
    out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(j), b.end());
    return out;
}

}  // namespace

void GF2Matrix::set_column(Index j, std::vector<Index> entries) {
    columns_[static_cast<std::size_t>(j)] = normalize_column(std::move(entries));
}

void GF2Matrix::append_column(std::vector<Index> entries) {
    columns_.push_back(normalize_column(std::move(entries)));
}

bool GF2Matrix::entry(Index i, Index j) const {
    const auto& c = column(j);
    return std::binary_search(c.begin(), c.end(), i);
}

void GF2Matrix::validate() const {
    for (Index j = 0; j < cols(); ++j) {
        const auto& c = column(j);
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c[k] < 0 || c[k] >= rows_)
                throw std::invalid_argument("row index " + std::to_string(c[k] + 1) + " out of range in column " +
                                            std::to_string(j + 1));
            if (k > 0 && c[k - 1] >= c[k])
                throw std::invalid_argument("column " + std::to_string(j + 1) + " is not strictly increasing");
        }
    }
}

std::size_t GF2Matrix::nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
}

GF2Matrix GF2Matrix::select_columns(std::span<const Index> keep) const {
    GF2Matrix out(rows_, 0);
    out.columns_.reserve(keep.size());
    for (Index j : keep) out.columns_.push_back(column(j));
    return out;
}

GF2Matrix GF2Matrix::select_rows(std::span<const Index> keep) const {
    std::vector<Index> map(static_cast<std::size_t>(rows_), -1);
    for (std::size_t k = 0; k < keep.size(); ++k) map[static_cast<std::size_t>(keep[k])] = static_cast<Index>(k);
    GF2Matrix out(static_cast<Index>(keep.size()), cols());
    for (Index j = 0; j < cols(); ++j) {
        std::vector<Index> c;
        for (Index r : column(j))
            if (map[static_cast<std::size_t>(r)] >= 0) c.push_back(map[static_cast<std::size_t>(r)]);
        out.columns_[static_cast<std::size_t>(j)] = std::move(c);
    }
    return out;
}

GF2Matrix GF2Matrix::permute_rows(std::span<const Index> row_map) const {
    GF2Matrix out(rows_, cols());
    for (Index j = 0; j < cols(); ++j) {
        std::vector<Index> c;
        c.reserve(column(j).size());
        for (Index r : column(j)) c.push_back(row_map[static_cast<std::size_t>(r)]);
        std::sort(c.begin(), c.end());
        out.columns_[static_cast<std::size_t>(j)] = std::move(c);
    }
    return out;
}

GF2Matrix multiply(const GF2Matrix& a, const GF2Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
    GF2Matrix out(a.rows(), b.cols());
    for (Index j = 0; j < b.cols(); ++j) {
        std::vector<Index> acc;
        for (Index k : b.column(j)) acc = add_columns(acc, a.column(k));
        out.set_column(j, std::move(acc));
    }
    return out;
}

bool is_zero(const GF2Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j)
        if (!m.column(j).empty()) return false;
    return true;
}

std::vector<Index> BitVector::ones() const {
    std::vector<Index> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t word = words_[w];
        while (word) {
            const int b = __builtin_ctzll(word);
            out.push_back(static_cast<Index>(w * 64 + static_cast<std::size_t>(b)));
            word &= word - 1;
        }
    }
    return out;
}

BitVector to_bits(const std::vector<Index>& entries, std::size_t bits) {
    BitVector v(bits);
    for (Index e : entries) v.flip(static_cast<std::size_t>(e));
    return v;
}

bool Gf2Basis::insert(BitVector v) {
    reduce(v);
    const long h = v.highest();
    if (h < 0) return false;
    pivot_[static_cast<std::size_t>(h)] = static_cast<long>(vectors_.size());
    vectors_.push_back(std::move(v));
    return true;
}

void Gf2Basis::reduce(BitVector& v) const {
    for (long h = v.highest(); h >= 0;) {
        const long p = pivot_[static_cast<std::size_t>(h)];
        if (p < 0) return;
        v ^= vectors_[static_cast<std::size_t>(p)];
        h = v.highest();
    }
}

bool Gf2Basis::contains(BitVector v) const {
    reduce(v);
    return v.none();
}

std::size_t dim_of_sum(const Gf2Basis& a, const Gf2Basis& b) {
    const Gf2Basis& big = a.dim() >= b.dim() ? a : b;
    const Gf2Basis& small = a.dim() >= b.dim() ? b : a;
    Gf2Basis sum = big;
    for (const auto& v : small.vectors()) sum.insert(v);
    return sum.dim();
}

Gf2Basis restrict_to_coordinates(const Gf2Basis& a, const std::vector<bool>& allowed) {
    const std::size_t n = a.ambient();
    // Pivoting only on forbidden coordinates: a vector whose forbidden part
    // reduces to zero lies in the coordinate subspace.
    std::vector<long> forbidden_pivot(n, -1);
    std::vector<BitVector> pivots;
    Gf2Basis out(n);
    BitVector mask(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!allowed[i]) mask.set(i);
    auto highest_forbidden = [&](const BitVector& v) -> long {
        const auto vw = v.words();
        const auto mw = mask.words();
        for (std::size_t w = vw.size(); w-- > 0;) {
            const std::uint64_t x = vw[w] & mw[w];
            if (x) return static_cast<long>(w * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(x)));
        }
        return -1;
    };
    for (BitVector v : a.vectors()) {
        long h = highest_forbidden(v);
        while (h >= 0 && forbidden_pivot[static_cast<std::size_t>(h)] >= 0) {
            v ^= pivots[static_cast<std::size_t>(forbidden_pivot[static_cast<std::size_t>(h)])];
            h = highest_forbidden(v);
        }
        if (h < 0) {
            out.insert(std::move(v));
        } else {
            forbidden_pivot[static_cast<std::size_t>(h)] = static_cast<long>(pivots.size());
            pivots.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace bifiber
