// Lines of non-negative slope and the push map onto them.

#pragma once

#include "bifiber/rational.hpp"

#include <optional>
#include <string>

namespace bifiber {

struct LineSpec {
    enum class Kind { Finite, Vertical };

    Kind kind = Kind::Finite;
    Rational slope;      // finite lines: y = slope * x + intercept
    Rational intercept;
    Rational x;          // vertical lines: x = const

    static LineSpec finite(Rational s, Rational b) {
        LineSpec l;
        l.slope = std::move(s);
        l.intercept = std::move(b);
        return l;
    }
    static LineSpec vertical(Rational at) {
        LineSpec l;
        l.kind = Kind::Vertical;
        l.x = std::move(at);
        return l;
    }

    bool is_vertical() const { return kind == Kind::Vertical; }
    bool is_horizontal() const { return kind == Kind::Finite && slope == 0; }

    /// Throws InputError for negative slopes.
    void validate() const;

    /// The same line after translating the plane by (dx, dy).
    LineSpec translated(const Rational& dx, const Rational& dy) const;

    std::string describe() const;
};

/// Least point of L dominating a, or nullopt (infinity).
std::optional<Bigrade> push(const LineSpec& line, const Bigrade& a);

/// Monotone coordinate of a point on L: y for vertical lines, x otherwise.
const Rational& line_position(const LineSpec& line, const Bigrade& on_line);

}  // namespace bifiber
