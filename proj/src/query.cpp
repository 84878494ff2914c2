#include "bifiber/query.hpp"

#include "bifiber/errors.hpp"
#include "bifiber/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bifiber {

int select_coface(const AugmentedArrangement& aug, const LineSpec& line) {
    line.validate();
    if (line.is_vertical()) return aug.vertical.lookup(line.x + aug.shift);
    const DualPoint p = dual_ell(line.translated(aug.shift, Rational(0)));
    if (line.is_horizontal()) return aug.locator.face_below_or_at(p);
    const Location loc = aug.locator.locate(p);
    check_invariant(!loc.faces.empty(), "point location returned no face");
    return loc.faces.front();
}

Barcode query_barcode(const AugmentedArrangement& aug, const LineSpec& line) {
    const int face = select_coface(aug, line);
    std::vector<TemplateBar> bars;
    for (const auto& bar : aug.templates.at(static_cast<std::size_t>(face))) {
        auto birth = push(line, bar.birth);
        if (!birth) continue;
        std::optional<Bigrade> death;
        if (bar.death) {
            death = push(line, *bar.death);
            if (death && !(line_position(line, *birth) < line_position(line, *death))) continue;
        }
        bars.push_back({*birth, death, bar.multiplicity});
    }
    return canonical_template(std::move(bars));
}

namespace {

Bigrade point_at(const LineSpec& line, const Rational& pos) {
    if (line.is_vertical()) return {line.x, pos};
    return {pos, line.slope * pos + line.intercept};
}

}  // namespace

Barcode slice_oracle(const FIRep& rep, const LineSpec& line) {
    line.validate();
    auto finite_columns = [&](const std::vector<Bigrade>& gr, std::vector<Index>& cols, std::vector<Rational>& pos) {
        for (std::size_t j = 0; j < gr.size(); ++j) {
            if (auto p = push(line, gr[j])) {
                cols.push_back(static_cast<Index>(j));
                pos.push_back(line_position(line, *p));
            }
        }
        std::vector<std::size_t> order(cols.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pos[a] < pos[b]; });
        std::vector<Index> c2;
        std::vector<Rational> p2;
        for (auto i : order) {
            c2.push_back(cols[i]);
            p2.push_back(pos[i]);
        }
        cols = std::move(c2);
        pos = std::move(p2);
    };
    std::vector<Index> cols1, cols2;
    std::vector<Rational> pos1, pos2;
    finite_columns(rep.gr1, cols1, pos1);
    finite_columns(rep.gr2, cols2, pos2);

    // Relations only involve generators of smaller grade, so finite relation
    // columns have finite rows.
    const GF2Matrix d1 = rep.d1.select_columns(cols1);
    std::vector<Index> row_map(static_cast<std::size_t>(rep.m1()), -1);
    for (std::size_t i = 0; i < cols1.size(); ++i) row_map[static_cast<std::size_t>(cols1[i])] = static_cast<Index>(i);
    GF2Matrix d2(static_cast<Index>(cols1.size()), 0);
    for (Index j : cols2) {
        std::vector<Index> col;
        for (Index i : rep.d2.column(j)) {
            check_invariant(row_map[static_cast<std::size_t>(i)] >= 0, "slice: relation involves an unreachable generator");
            col.push_back(row_map[static_cast<std::size_t>(i)]);
        }
        d2.append_column(std::move(col));
    }
    const RuState ru = reduce_state(d1, d2, false);
    std::vector<TemplateBar> bars;
    for (const auto& iv : barcode_from_ru(pos1, pos2, ru)) {
        if (iv.death && !(iv.birth < *iv.death)) continue;
        std::optional<Bigrade> death;
        if (iv.death) death = point_at(line, *iv.death);
        bars.push_back({point_at(line, iv.birth), death, 1});
    }
    return canonical_template(std::move(bars));
}

// ---------------------------------------------------------------------------

double ParamValue::approx() const { return coef.get_d() * std::sqrt(radicand.get_d()); }

bool ParamValue::at_most_root(const Rational& bound_sq) const {
    if (sgn(coef) <= 0) return true;
    return coef * coef * radicand <= bound_sq;
}

ParamValue LineParam::at(const Bigrade& p) const {
    if (line.is_vertical()) return {p.y - origin.y, Rational(1)};
    return {p.x - origin.x, Rational(1) + line.slope * line.slope};
}

LineParam parameterize(const LineSpec& line, const Bigrade& corner) {
    LineParam lp{line, corner, {}};
    // Rules apply with the window corner moved to the origin.
    const LineSpec local = line.translated(-corner.x, -corner.y);
    Bigrade o;
    if (local.is_vertical()) {
        o = {local.x, Rational(0)};
    } else if (local.is_horizontal()) {
        o = {Rational(0), local.intercept};
    } else if (sgn(local.intercept) >= 0) {
        o = {Rational(0), local.intercept};
    } else {
        o = {-local.intercept / local.slope, Rational(0)};
    }
    lp.origin = {o.x + corner.x, o.y + corner.y};
    return lp;
}

int PersistenceDiagram::total() const {
    int n = overflow_essential + overflow_finite;
    for (const auto* bucket : {&in_window, &inf_strip, &lt_inf_strip})
        for (const auto& p : *bucket) n += p.multiplicity;
    return n;
}

namespace {

struct Affine {
    Bigrade a;
    Rational wx{1};
    Rational wy{1};

    Bigrade map(const Bigrade& p) const { return {(p.x - a.x) / wx, (p.y - a.y) / wy}; }

    LineSpec map(const LineSpec& l) const {
        if (l.is_vertical()) return LineSpec::vertical((l.x - a.x) / wx);
        return LineSpec::finite(l.slope * wx / wy, (l.slope * a.x + l.intercept - a.y) / wy);
    }
};

}  // namespace

PersistenceDiagram diagram(const AugmentedArrangement& aug, const LineSpec& line, const Barcode& barcode,
                           bool normalized) {
    Affine f;
    Bigrade corner{Rational(0), Rational(0)};
    Rational bound_sq(1);
    if (aug.has_bounds) {
        f.a = aug.lower;
        if (normalized) {
            if (aug.upper.x > aug.lower.x) f.wx = aug.upper.x - aug.lower.x;
            if (aug.upper.y > aug.lower.y) f.wy = aug.upper.y - aug.lower.y;
            const Bigrade b = f.map(aug.upper);
            bound_sq = b.x * b.x + b.y * b.y;
        } else {
            corner = aug.lower;
            const Rational dx = aug.upper.x - aug.lower.x;
            const Rational dy = aug.upper.y - aug.lower.y;
            bound_sq = dx * dx + dy * dy;
        }
    }
    PersistenceDiagram d;
    d.bound_sq = bound_sq;
    auto bar_point = [&](const Bigrade& p) { return normalized && aug.has_bounds ? f.map(p) : p; };
    d.param = normalized && aug.has_bounds ? parameterize(f.map(line), corner) : parameterize(line, corner);
    for (const auto& bar : barcode) {
        DiagramPoint p{d.param.at(bar_point(bar.birth)), std::nullopt, bar.multiplicity};
        if (bar.death) p.death = d.param.at(bar_point(*bar.death));
        const bool birth_in = p.birth.at_most_root(bound_sq);
        if (!p.death) {
            if (birth_in)
                d.inf_strip.push_back(p);
            else
                d.overflow_essential += p.multiplicity;
        } else if (!birth_in) {
            d.overflow_finite += p.multiplicity;
        } else if (p.death->at_most_root(bound_sq)) {
            d.in_window.push_back(p);
        } else {
            d.lt_inf_strip.push_back(p);
        }
    }
    return d;
}

PersistenceDiagram diagram(const AugmentedArrangement& aug, const LineSpec& line, bool normalized) {
    return diagram(aug, line, query_barcode(aug, line), normalized);
}

}  // namespace bifiber
