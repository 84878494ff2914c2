// Linear algebra over the two-element field.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bifiber {

using Index = std::int32_t;

/// Column-sparse matrix over GF(2). Each column holds the strictly increasing
/// row indices (0-based) of its nonzero entries.
class GF2Matrix {
public:
    GF2Matrix() = default;
    GF2Matrix(Index rows, Index cols) : rows_(rows), columns_(static_cast<std::size_t>(cols)) {}

    Index rows() const { return rows_; }
    Index cols() const { return static_cast<Index>(columns_.size()); }

    const std::vector<Index>& column(Index j) const { return columns_[static_cast<std::size_t>(j)]; }

    /// Replaces column j; the entries are sorted and duplicate pairs cancel.
    void set_column(Index j, std::vector<Index> entries);
    void append_column(std::vector<Index> entries);

    bool entry(Index i, Index j) const;

    /// Largest row index in column j, or -1 when the column is zero.
    Index low(Index j) const {
        const auto& c = column(j);
        return c.empty() ? -1 : c.back();
    }

    /// Throws std::invalid_argument if an entry is out of range or a column
    /// is not strictly increasing.
    void validate() const;

    std::size_t nonzeros() const;

    /// Keeps the listed columns, in the given order.
    GF2Matrix select_columns(std::span<const Index> keep) const;

    /// Keeps the listed rows (which must be increasing) and renumbers them
    /// consecutively. Entries in dropped rows are discarded.
    GF2Matrix select_rows(std::span<const Index> keep) const;

    /// Rows are renumbered by new_row = row_map[old_row]; columns re-sorted.
    GF2Matrix permute_rows(std::span<const Index> row_map) const;

    friend bool operator==(const GF2Matrix&, const GF2Matrix&) = default;

private:
    Index rows_ = 0;
    std::vector<std::vector<Index>> columns_;
};

/// Product a*b over GF(2).
GF2Matrix multiply(const GF2Matrix& a, const GF2Matrix& b);

bool is_zero(const GF2Matrix& m);

/// Fixed-length dense bit vector.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

    std::size_t size() const { return bits_; }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
    void assign(std::size_t i, bool v) {
        if (v) set(i); else reset(i);
    }

    /// Exchanges bits i and j.
    void swap_bits(std::size_t i, std::size_t j) {
        const bool a = test(i);
        const bool b = test(j);
        if (a != b) {
            flip(i);
            flip(j);
        }
    }

    BitVector& operator^=(const BitVector& other) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }

    bool none() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    /// Highest set bit, or -1.
    long highest() const {
        for (std::size_t w = words_.size(); w-- > 0;)
            if (words_[w]) return static_cast<long>(w * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(words_[w])));
        return -1;
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
        return n;
    }

    std::vector<Index> ones() const;

    std::span<const std::uint64_t> words() const { return words_; }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

BitVector to_bits(const std::vector<Index>& entries, std::size_t bits);

/// Row-echelon basis of a subspace of GF(2)^n, keyed by highest set bit.
class Gf2Basis {
public:
    explicit Gf2Basis(std::size_t ambient = 0) : ambient_(ambient), pivot_(ambient, -1) {}

    std::size_t ambient() const { return ambient_; }
    std::size_t dim() const { return vectors_.size(); }

    /// Reduces v against the basis; returns true (and stores the residue)
    /// if v was independent.
    bool insert(BitVector v);

    /// Reduces v in place; the result is zero iff v lies in the span.
    void reduce(BitVector& v) const;
    bool contains(BitVector v) const;

    const std::vector<BitVector>& vectors() const { return vectors_; }

private:
    std::size_t ambient_;
    std::vector<long> pivot_;
    std::vector<BitVector> vectors_;
};

/// dim(span(a) + span(b)).
std::size_t dim_of_sum(const Gf2Basis& a, const Gf2Basis& b);

/// Basis of the intersection of span(a) with the coordinate subspace spanned
/// by the coordinates where `allowed` is set.
Gf2Basis restrict_to_coordinates(const Gf2Basis& a, const std::vector<bool>& allowed);

}  // namespace bifiber
