// Bifiltrations, free implicit representations, and grade transforms.

#pragma once

#include "bifiber/gf2.hpp"
#include "bifiber/rational.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bifiber {

struct Simplex {
    std::vector<int> vertices;  // strictly increasing
    Bigrade grade;

    int dim() const { return static_cast<int>(vertices.size()) - 1; }
};

/// A 1-critical bifiltration: every simplex carries its unique grade of
/// appearance.
struct Bifiltration {
    std::vector<Simplex> simplices;
    std::string xlabel;
    std::string ylabel;
};

/// Free implicit representation (gr1, gr2, D1, D2) over GF(2). The module
/// is ker D1 / im D2. D1 is m0 x m1 and D2 is m1 x m2.
struct FIRep {
    Index m0 = 0;
    std::vector<Bigrade> gr1;
    std::vector<Bigrade> gr2;
    GF2Matrix d1;
    GF2Matrix d2;

    Index m1() const { return static_cast<Index>(gr1.size()); }
    Index m2() const { return static_cast<Index>(gr2.size()); }
    bool empty() const { return gr1.empty(); }

    /// Checks dimensions, D1*D2 = 0 and grade monotonicity of D2.
    /// Throws InputError.
    void validate() const;
};

struct Grid2 {
    std::vector<Rational> xs;
    std::vector<Rational> ys;

    int nx() const { return static_cast<int>(xs.size()); }
    int ny() const { return static_cast<int>(ys.size()); }
    Bigrade at(GridPoint p) const { return {xs[static_cast<std::size_t>(p.x)], ys[static_cast<std::size_t>(p.y)]}; }

    friend bool operator==(const Grid2&, const Grid2&) = default;
};

/// FI-rep whose grades are 0-based indices into a grid.
struct GridFIRep {
    Grid2 grid;
    Index m0 = 0;
    std::vector<GridPoint> gr1;
    std::vector<GridPoint> gr2;
    GF2Matrix d1;
    GF2Matrix d2;

    Index m1() const { return static_cast<Index>(gr1.size()); }
    Index m2() const { return static_cast<Index>(gr2.size()); }
};

// ---- ingestion ----

Bifiltration parse_bifiltration(std::string_view text);
std::string write_bifiltration(const Bifiltration& bif);

/// Verifies face closure, grade monotonicity and uniqueness. Throws InputError.
void validate_bifiltration(const Bifiltration& bif);

struct Point2 {
    Rational x;
    Rational y;
};

/// Distance threshold t with d(p,q) <= 2t. Exact when the squared distance is
/// a rational square, otherwise a monotone rounding to 1e-9.
Rational rips_threshold(const Point2& p, const Point2& q);

/// Function-Rips bifiltration. Simplices up to dimension max_dim whose
/// threshold does not exceed max_scale.
Bifiltration rips_bifiltration(const std::vector<Point2>& points, const std::vector<Rational>& codensity,
                               const Rational& max_scale, int max_dim);

FIRep firep_from_bifiltration(const Bifiltration& bif, int degree);

FIRep parse_firep(std::string_view text);
std::string write_firep(const FIRep& rep);

/// Parses either input format, selected by the header line.
FIRep parse_module_text(std::string_view text, int degree);

// ---- grade transforms ----

/// Sorts the columns of both grade sets colexicographically (stable),
/// permuting the matrices accordingly.
FIRep sort_colex(const FIRep& rep);

/// Drops all columns whose grade is not <= bound.
FIRep trim(const FIRep& rep, const Bigrade& bound);

/// Componentwise ceiling of every grade onto the grid.
FIRep coarsen(const FIRep& rep, const Grid2& grid);

/// n evenly spaced values from lo to hi inclusive; n == 1 gives {hi}.
std::vector<Rational> uniform_values(const Rational& lo, const Rational& hi, int n);

/// Glb and lub of all grades, if any.
std::optional<std::pair<Bigrade, Bigrade>> grade_bounds(const FIRep& rep);

GridFIRep discretize(const FIRep& rep);
FIRep undiscretize(const GridFIRep& rep);

/// Cancels pairs (generator of gr1, relation of gr2) of equal grade linked by
/// a nonzero D2 entry, and drops zero relation columns. The homology module
/// is unchanged.
FIRep simplify(const FIRep& rep);

}  // namespace bifiber
