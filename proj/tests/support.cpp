#include "support.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace testsupport {

Rational q(long p, long d) {
    Rational r(p, d);
    r.canonicalize();
    return r;
}

Bigrade g(long x, long y) { return {Rational(x), Rational(y)}; }
Bigrade g(const Rational& x, const Rational& y) { return {x, y}; }

FIRep presentation(const std::vector<Bigrade>& gens, const std::vector<std::pair<Bigrade, std::vector<Index>>>& rels) {
    FIRep rep;
    rep.m0 = 0;
    rep.gr1 = gens;
    rep.d1 = GF2Matrix(0, static_cast<Index>(gens.size()));
    rep.d2 = GF2Matrix(static_cast<Index>(gens.size()), 0);
    for (const auto& [grade, rows] : rels) {
        rep.gr2.push_back(grade);
        rep.d2.append_column(rows);
    }
    return rep;
}

FIRep module_m() { return presentation({g(1, 0), g(0, 1), g(1, 1)}, {{g(1, 1), {0, 1}}}); }

FIRep module_n() { return presentation({g(1, 0), g(0, 1)}, {}); }

FIRep module_point() { return presentation({g(0, 0)}, {{g(1, 0), {0}}, {g(0, 1), {0}}}); }

std::string module_m_text() {
    return "firep\n"
           "# generators a, b, c and the relation x2 a - x1 b\n"
           "0 3 1\n"
           "1 0 ;\n"
           "0 1 ;\n"
           "1 1 ;\n"
           "1 1 ; 1 2\n";
}

Bifiltration random_bifiltration(std::mt19937& rng, int max_vertices, int grid, int max_dim) {
    std::uniform_int_distribution<int> nv(1, max_vertices);
    std::uniform_int_distribution<int> coord(0, grid - 1);
    std::uniform_int_distribution<int> bump(0, 2);
    std::bernoulli_distribution keep_edge(0.6), keep_tri(0.5), no_bump(0.5);
    const int n = nv(rng);
    std::map<std::vector<int>, Bigrade> grade;
    auto raise = [&](Bigrade b) {
        if (!no_bump(rng)) b.x = std::min<Rational>(Rational(grid - 1), b.x + bump(rng));
        if (!no_bump(rng)) b.y = std::min<Rational>(Rational(grid - 1), b.y + bump(rng));
        return b;
    };
    Bifiltration bif;
    for (int v = 0; v < n; ++v) {
        grade[{v}] = g(coord(rng), coord(rng));
        bif.simplices.push_back({{v}, grade[{v}]});
    }
    if (max_dim >= 1)
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                if (!keep_edge(rng)) continue;
                grade[{a, b}] = raise(lub(grade[{a}], grade[{b}]));
                bif.simplices.push_back({{a, b}, grade[{a, b}]});
            }
    if (max_dim >= 2)
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                for (int c = b + 1; c < n; ++c) {
                    if (!grade.count({a, b}) || !grade.count({a, c}) || !grade.count({b, c}) || !keep_tri(rng)) continue;
                    grade[{a, b, c}] = raise(lub(lub(grade[{a, b}], grade[{a, c}]), grade[{b, c}]));
                    bif.simplices.push_back({{a, b, c}, grade[{a, b, c}]});
                }
    std::shuffle(bif.simplices.begin(), bif.simplices.end(), rng);
    return bif;
}

FIRep random_firep(std::mt19937& rng, int degree, int max_vertices, int grid) {
    return firep_from_bifiltration(random_bifiltration(rng, max_vertices, grid, degree + 1), degree);
}

// ---------------------------------------------------------------------------

int dense_rank(std::vector<DenseCol> cols) {
    int rank = 0;
    if (cols.empty()) return 0;
    const std::size_t rows = cols.front().size();
    std::size_t next = 0;
    for (std::size_t r = 0; r < rows && next < cols.size(); ++r) {
        std::size_t pivot = next;
        while (pivot < cols.size() && !cols[pivot][r]) ++pivot;
        if (pivot == cols.size()) continue;
        std::swap(cols[pivot], cols[next]);
        for (std::size_t c = 0; c < cols.size(); ++c)
            if (c != next && cols[c][r])
                for (std::size_t i = 0; i < rows; ++i) cols[c][i] ^= cols[next][i];
        ++next;
        ++rank;
    }
    return rank;
}

std::vector<DenseCol> dense_nullspace(const std::vector<DenseCol>& cols, std::size_t rows) {
    // Row-reduce the rows x n matrix and read off free variables.
    const std::size_t n = cols.size();
    std::vector<DenseCol> m(rows, DenseCol(n, 0));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < rows; ++i) m[i][j] = cols[j][i];
    std::vector<long> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && !m[p][c]) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && m[i][c])
                for (std::size_t k = 0; k < n; ++k) m[i][k] ^= m[r][k];
        pivot_col.push_back(static_cast<long>(c));
        ++r;
    }
    std::vector<char> is_pivot(n, 0);
    for (long c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = 1;
    std::vector<DenseCol> basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        DenseCol v(n, 0);
        v[f] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            if (m[i][f]) v[static_cast<std::size_t>(pivot_col[i])] = 1;
        basis.push_back(v);
    }
    return basis;
}

namespace {

// Cycles of generators <= p, as vectors in GF(2)^m1.
std::vector<DenseCol> cycles_at(const FIRep& rep, const Bigrade& p) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < rep.gr1.size(); ++j)
        if (leq(rep.gr1[j], p)) idx.push_back(j);
    std::vector<DenseCol> cols;
    for (auto j : idx) {
        DenseCol c(static_cast<std::size_t>(rep.m0), 0);
        for (Index i : rep.d1.column(static_cast<Index>(j))) c[static_cast<std::size_t>(i)] = 1;
        cols.push_back(c);
    }
    std::vector<DenseCol> out;
    for (const auto& v : dense_nullspace(cols, static_cast<std::size_t>(rep.m0))) {
        DenseCol full(static_cast<std::size_t>(rep.m1()), 0);
        for (std::size_t k = 0; k < idx.size(); ++k) full[idx[k]] = v[k];
        out.push_back(full);
    }
    return out;
}

std::vector<DenseCol> boundaries_at(const FIRep& rep, const Bigrade& p) {
    std::vector<DenseCol> out;
    for (std::size_t j = 0; j < rep.gr2.size(); ++j) {
        if (!leq(rep.gr2[j], p)) continue;
        DenseCol c(static_cast<std::size_t>(rep.m1()), 0);
        for (Index i : rep.d2.column(static_cast<Index>(j))) c[static_cast<std::size_t>(i)] = 1;
        out.push_back(c);
    }
    return out;
}

}  // namespace

int dim_at(const FIRep& rep, const Bigrade& p) { return rank_between(rep, p, p); }

int rank_between(const FIRep& rep, const Bigrade& p, const Bigrade& q) {
    if (rep.m1() == 0) return 0;
    auto z = cycles_at(rep, p);
    auto b = boundaries_at(rep, q);
    const int rb = dense_rank(b);
    z.insert(z.end(), b.begin(), b.end());
    return dense_rank(z) - rb;
}

Barcode rank_barcode(const FIRep& rep, const LineSpec& line) {
    std::set<Rational> positions;
    for (const auto* gr : {&rep.gr1, &rep.gr2})
        for (const auto& a : *gr)
            if (auto p = push(line, a)) positions.insert(line_position(line, *p));
    std::vector<Rational> t(positions.begin(), positions.end());
    auto point = [&](std::size_t i) -> Bigrade {
        if (line.is_vertical()) return {line.x, t[i]};
        return {t[i], line.slope * t[i] + line.intercept};
    };
    const std::size_t k = t.size();
    std::vector<std::vector<int>> r(k, std::vector<int>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) r[i][j] = rank_between(rep, point(i), point(j));
    auto rank = [&](long i, long j) { return i < 0 ? 0 : r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
    std::vector<TemplateBar> bars;
    for (std::size_t i = 0; i < k; ++i) {
        const long li = static_cast<long>(i);
        for (std::size_t j = i + 1; j < k; ++j) {
            const long lj = static_cast<long>(j);
            const int m = rank(li, lj - 1) - rank(li, lj) - rank(li - 1, lj - 1) + rank(li - 1, lj);
            if (m > 0) bars.push_back({point(i), point(j), m});
        }
        const int m = rank(li, static_cast<long>(k) - 1) - rank(li - 1, static_cast<long>(k) - 1);
        if (m > 0) bars.push_back({point(i), std::nullopt, m});
    }
    return canonical_template(std::move(bars));
}

std::vector<LineSpec> sample_lines(std::mt19937& rng, const AugmentedArrangement& aug, int count) {
    std::uniform_int_distribution<int> kind(0, 5);
    std::uniform_int_distribution<int> num(0, 24), den(1, 4), inum(-28, 28);
    std::vector<LineSpec> out;
    std::vector<Bigrade> vertex_duals;
    for (const auto& v : aug.dcel.vertices()) vertex_duals.push_back({v.x, v.y});
    while (static_cast<int>(out.size()) < count) {
        const int k = kind(rng);
        const Rational slope = k == 0 ? Rational(0) : q(num(rng), den(rng));
        if (k <= 1) {
            out.push_back(LineSpec::finite(slope, q(inum(rng), den(rng))));
        } else if (k == 2) {
            out.push_back(LineSpec::vertical(q(inum(rng), den(rng))));
        } else if (k == 3 && !aug.anchors.empty()) {
            const auto& a = aug.anchors[static_cast<std::size_t>(rng() % aug.anchors.size())];
            out.push_back(LineSpec::finite(slope, a.y - slope * a.x));
        } else if (k == 4 && !aug.anchors.empty()) {
            const auto& a = aug.anchors[static_cast<std::size_t>(rng() % aug.anchors.size())];
            out.push_back(LineSpec::vertical(a.x));
        } else if (k == 5 && !vertex_duals.empty()) {
            const auto& v = vertex_duals[static_cast<std::size_t>(rng() % vertex_duals.size())];
            // Arrangement vertex (c, d) is the line y = c x - d in shifted coordinates.
            out.push_back(LineSpec::finite(v.x, -v.y).translated(-aug.shift, Rational(0)));
        }
    }
    return out;
}

std::string describe(const Barcode& bc) {
    std::ostringstream os;
    os << "{";
    for (const auto& bar : bc) {
        os << " [" << bar.birth << ", ";
        if (bar.death)
            os << *bar.death;
        else
            os << "inf";
        os << ")x" << bar.multiplicity;
    }
    os << " }";
    return os.str();
}

}  // namespace testsupport
