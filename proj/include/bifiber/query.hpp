// Slice barcodes from the augmented arrangement, the direct slice oracle and
// the parameterized persistence diagram.

#pragma once

#include "bifiber/line.hpp"
#include "bifiber/model.hpp"
#include "bifiber/templates.hpp"

#include <optional>
#include <vector>

namespace bifiber {

/// Intervals [birth, death) with endpoints on the query line.
using Barcode = std::vector<TemplateBar>;

int select_coface(const AugmentedArrangement& aug, const LineSpec& line);

Barcode query_barcode(const AugmentedArrangement& aug, const LineSpec& line);

/// Reduction of the FI-rep restricted to the line.
Barcode slice_oracle(const FIRep& rep, const LineSpec& line);

/// coef * sqrt(radicand), radicand > 0.
struct ParamValue {
    Rational coef;
    Rational radicand{1};

    double approx() const;
    /// value <= sqrt(bound_sq)
    bool at_most_root(const Rational& bound_sq) const;

    friend bool operator==(const ParamValue&, const ParamValue&) = default;
};

/// Order-preserving isometry R -> L. Coordinates are relative to the window
/// corner `corner`.
struct LineParam {
    LineSpec line;
    Bigrade corner;
    Bigrade origin;  // gamma(0), in plane coordinates

    ParamValue at(const Bigrade& on_line) const;
};

LineParam parameterize(const LineSpec& line, const Bigrade& corner = {Rational(0), Rational(0)});

struct DiagramPoint {
    ParamValue birth;
    std::optional<ParamValue> death;
    int multiplicity = 1;
};

struct PersistenceDiagram {
    Rational bound_sq;  // |B|^2
    LineParam param;
    std::vector<DiagramPoint> in_window;
    std::vector<DiagramPoint> inf_strip;
    std::vector<DiagramPoint> lt_inf_strip;
    int overflow_essential = 0;
    int overflow_finite = 0;

    int total() const;
};

/// Buckets a barcode on `line`. Normalized mode maps the window [A, B] to the
/// unit square first; the line and barcode stay in plane coordinates.
PersistenceDiagram diagram(const AugmentedArrangement& aug, const LineSpec& line, const Barcode& barcode,
                           bool normalized);

PersistenceDiagram diagram(const AugmentedArrangement& aug, const LineSpec& line, bool normalized);

}  // namespace bifiber
