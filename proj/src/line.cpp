#include "bifiber/line.hpp"

#include "bifiber/errors.hpp"

namespace bifiber {

void LineSpec::validate() const {
    if (kind == Kind::Finite && slope < 0) throw InputError("line slope must be non-negative");
}

LineSpec LineSpec::translated(const Rational& dx, const Rational& dy) const {
    if (is_vertical()) return vertical(x + dx);
    // y - dy = s (x - dx) + b
    return finite(slope, intercept + dy - slope * dx);
}

std::string LineSpec::describe() const {
    if (is_vertical()) return "x = " + to_short_string(x);
    return "y = " + to_short_string(slope) + " x + " + to_short_string(intercept);
}

std::optional<Bigrade> push(const LineSpec& line, const Bigrade& a) {
    if (line.is_vertical()) {
        if (a.x > line.x) return std::nullopt;
        return Bigrade{line.x, a.y};
    }
    if (line.slope == 0) {
        if (a.y > line.intercept) return std::nullopt;
        return Bigrade{a.x, line.intercept};
    }
    Rational y_at = line.slope * a.x + line.intercept;
    if (y_at >= a.y) return Bigrade{a.x, std::move(y_at)};
    Rational x_at = (a.y - line.intercept) / line.slope;
    return Bigrade{std::move(x_at), a.y};
}

const Rational& line_position(const LineSpec& line, const Bigrade& on_line) {
    return line.is_vertical() ? on_line.y : on_line.x;
}

}  // namespace bifiber
