// Exact rational scalars and bigrades.

#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bifiber {

using Rational = mpq_class;

/// Parses an integer ("-3"), a decimal ("0.25", "1e-3", ".5") or a fraction
/// ("7/4") into an exact rational. Throws std::invalid_argument on junk.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers are written "p/1".
std::string to_fraction_string(const Rational& value);

/// Shortest human form: "p" for integers, "p/q" otherwise.
std::string to_short_string(const Rational& value);

Rational rational_from_int(long value);

/// A point of the plane with exact coordinates, ordered componentwise.
struct Bigrade {
    Rational x;
    Rational y;

    Bigrade() = default;
    Bigrade(Rational px, Rational py) : x(std::move(px)), y(std::move(py)) {}
    Bigrade(long px, long py) : x(px), y(py) {}

    friend bool operator==(const Bigrade& a, const Bigrade& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Bigrade& a, const Bigrade& b) { return !(a == b); }
};

/// Componentwise partial order.
inline bool leq(const Bigrade& a, const Bigrade& b) { return a.x <= b.x && a.y <= b.y; }
inline bool comparable(const Bigrade& a, const Bigrade& b) { return leq(a, b) || leq(b, a); }

inline Bigrade lub(const Bigrade& a, const Bigrade& b) {
    return {a.x < b.x ? b.x : a.x, a.y < b.y ? b.y : a.y};
}
inline Bigrade glb(const Bigrade& a, const Bigrade& b) {
    return {a.x < b.x ? a.x : b.x, a.y < b.y ? a.y : b.y};
}

/// Colexicographic order: by y, then by x.
inline bool colex_less(const Bigrade& a, const Bigrade& b) {
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

/// Lexicographic order: by x, then by y.
inline bool lex_less(const Bigrade& a, const Bigrade& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

struct LexLess {
    bool operator()(const Bigrade& a, const Bigrade& b) const { return lex_less(a, b); }
};

std::ostream& operator<<(std::ostream& os, const Bigrade& g);

/// Integer cell of a discrete grid (0-based column and row).
struct GridPoint {
    int x = 0;
    int y = 0;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
    friend auto operator<=>(const GridPoint& a, const GridPoint& b) {
        if (auto c = a.x <=> b.x; c != 0) return c;
        return a.y <=> b.y;
    }
};

inline bool leq(const GridPoint& a, const GridPoint& b) { return a.x <= b.x && a.y <= b.y; }
inline bool colex_less(const GridPoint& a, const GridPoint& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}
inline GridPoint lub(const GridPoint& a, const GridPoint& b) {
    return {a.x < b.x ? b.x : a.x, a.y < b.y ? b.y : a.y};
}

}  // namespace bifiber
