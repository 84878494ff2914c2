#include "bifiber/model.hpp"

#include "bifiber/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace bifiber {

namespace {

std::string strip_comment(std::string_view line) {
    auto hash = line.find('#');
    std::string s(line.substr(0, hash));
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && (s[start] == ' ' || s[start] == '\t')) ++start;
    return s.substr(start);
}

struct Line {
    int number;
    std::string text;
};

// Non-empty lines with comments stripped.
std::vector<Line> content_lines(std::string_view text) {
    std::vector<Line> out;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        auto s = strip_comment(text.substr(pos, end - pos));
        if (!s.empty()) out.push_back({number, std::move(s)});
        pos = end + 1;
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

[[noreturn]] void fail_at(int line, const std::string& msg) {
    throw InputError("line " + std::to_string(line) + ": " + msg);
}

Rational parse_at(int line, const std::string& tok) {
    try {
        return parse_rational(tok);
    } catch (const std::invalid_argument&) {
        fail_at(line, "bad number '" + tok + "'");
    }
}

long parse_int_at(int line, const std::string& tok) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9)
        fail_at(line, "bad index '" + tok + "'");
    return std::stol(tok);
}

// "lhs ; x y" split at the semicolon.
std::pair<std::vector<std::string>, std::vector<std::string>> split_semicolon(const Line& line) {
    auto semi = line.text.find(';');
    if (semi == std::string::npos) fail_at(line.number, "missing ';'");
    if (line.text.find(';', semi + 1) != std::string::npos) fail_at(line.number, "more than one ';'");
    return {split_ws(line.text.substr(0, semi)), split_ws(line.text.substr(semi + 1))};
}

std::string vertex_string(const std::vector<int>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
}

bool simplex_order(const Simplex& a, const Simplex& b) {
    if (a.grade != b.grade) return colex_less(a.grade, b.grade);
    return a.vertices < b.vertices;
}

std::vector<Index> inverse(const std::vector<Index>& p) {
    std::vector<Index> inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[static_cast<std::size_t>(p[i])] = static_cast<Index>(i);
    return inv;
}

// Keeps the columns of `keep` and renumbers everything consistently.
FIRep restrict_columns(const FIRep& rep, const std::vector<Index>& keep1, const std::vector<Index>& keep2) {
    FIRep out;
    out.m0 = rep.m0;
    for (Index j : keep1) out.gr1.push_back(rep.gr1[static_cast<std::size_t>(j)]);
    for (Index j : keep2) out.gr2.push_back(rep.gr2[static_cast<std::size_t>(j)]);
    out.d1 = rep.d1.select_columns(keep1);
    out.d2 = rep.d2.select_columns(keep2).select_rows(keep1);
    return out;
}

}  // namespace

void FIRep::validate() const {
    if (d1.rows() != m0 || d1.cols() != m1()) throw InputError("D1 has the wrong shape");
    if (d2.rows() != m1() || d2.cols() != m2()) throw InputError("D2 has the wrong shape");
    try {
        d1.validate();
        d2.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    for (Index j = 0; j < m2(); ++j)
        for (Index i : d2.column(j))
            if (!leq(gr1[static_cast<std::size_t>(i)], gr2[static_cast<std::size_t>(j)])) {
                std::ostringstream msg;
                msg << "relation " << j + 1 << " at " << gr2[static_cast<std::size_t>(j)] << " involves generator "
                    << i + 1 << " at " << gr1[static_cast<std::size_t>(i)] << " which is not below it";
                throw InputError(msg.str());
            }
    if (!is_zero(multiply(d1, d2))) throw InputError("D1 * D2 is not zero");
}

// ---------------------------------------------------------------------------
// bifiltration text

Bifiltration parse_bifiltration(std::string_view text) {
    auto lines = content_lines(text);
    if (lines.empty() || lines[0].text != "bifiltration") throw InputError("line 1: expected 'bifiltration'");
    Bifiltration bif;
    std::size_t k = 1;
    if (k < lines.size() && lines[k].text.rfind("--", 0) == 0) {
        auto toks = split_ws(lines[k].text);
        std::string* target = nullptr;
        for (const auto& t : toks) {
            if (t == "--xlabel")
                target = &bif.xlabel;
            else if (t == "--ylabel")
                target = &bif.ylabel;
            else if (target)
                *target += (target->empty() ? "" : " ") + t;
            else
                fail_at(lines[k].number, "unexpected token '" + t + "'");
        }
        ++k;
    }
    for (; k < lines.size(); ++k) {
        const auto& line = lines[k];
        auto [lhs, rhs] = split_semicolon(line);
        if (lhs.empty()) fail_at(line.number, "simplex has no vertices");
        if (rhs.size() != 2) fail_at(line.number, "expected two grade values after ';'");
        Simplex s;
        for (const auto& t : lhs) s.vertices.push_back(static_cast<int>(parse_int_at(line.number, t)));
        std::sort(s.vertices.begin(), s.vertices.end());
        if (std::adjacent_find(s.vertices.begin(), s.vertices.end()) != s.vertices.end())
            fail_at(line.number, "repeated vertex");
        s.grade = {parse_at(line.number, rhs[0]), parse_at(line.number, rhs[1])};
        bif.simplices.push_back(std::move(s));
    }
    validate_bifiltration(bif);
    return bif;
}

void validate_bifiltration(const Bifiltration& bif) {
    std::map<std::vector<int>, const Simplex*> index;
    for (const auto& s : bif.simplices) {
        if (!index.emplace(s.vertices, &s).second)
            throw InputError("simplex " + vertex_string(s.vertices) +
                             " appears more than once (multi-critical input is not supported)");
    }
    for (const auto& s : bif.simplices) {
        if (s.vertices.size() < 2) continue;
        for (std::size_t drop = 0; drop < s.vertices.size(); ++drop) {
            std::vector<int> face;
            for (std::size_t i = 0; i < s.vertices.size(); ++i)
                if (i != drop) face.push_back(s.vertices[i]);
            auto it = index.find(face);
            if (it == index.end())
                throw InputError("missing face " + vertex_string(face) + " of " + vertex_string(s.vertices));
            if (!leq(it->second->grade, s.grade)) {
                std::ostringstream msg;
                msg << "non-monotone grades: face " << vertex_string(face) << " at " << it->second->grade
                    << " is not below " << vertex_string(s.vertices) << " at " << s.grade;
                throw InputError(msg.str());
            }
        }
    }
}

std::string write_bifiltration(const Bifiltration& bif) {
    std::ostringstream out;
    out << "bifiltration\n";
    if (!bif.xlabel.empty() || !bif.ylabel.empty())
        out << "--xlabel " << bif.xlabel << " --ylabel " << bif.ylabel << "\n";
    for (const auto& s : bif.simplices) {
        for (int v : s.vertices) out << v << ' ';
        out << "; " << to_short_string(s.grade.x) << ' ' << to_short_string(s.grade.y) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// function-Rips

Rational rips_threshold(const Point2& p, const Point2& q) {
    const Rational dx = p.x - q.x;
    const Rational dy = p.y - q.y;
    const Rational d2 = dx * dx + dy * dy;
    const mpz_class pq = d2.get_num() * d2.get_den();
    if (mpz_perfect_square_p(pq.get_mpz_t())) {
        mpz_class root;
        mpz_sqrt(root.get_mpz_t(), pq.get_mpz_t());
        Rational t(root, 2 * d2.get_den());
        t.canonicalize();
        return t;
    }
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, 18);
    mpz_class scaled = (d2.get_num() * scale) / d2.get_den();  // floor, d2 >= 0
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    Rational t(root, mpz_class(2'000'000'000));
    t.canonicalize();
    return t;
}

Bifiltration rips_bifiltration(const std::vector<Point2>& points, const std::vector<Rational>& codensity,
                               const Rational& max_scale, int max_dim) {
    if (points.empty()) throw InputError("empty point set");
    if (codensity.size() != points.size()) throw InputError("codensity size does not match point count");
    if (max_scale < 0) throw InputError("negative max scale");
    const int n = static_cast<int>(points.size());
    std::vector<std::vector<Rational>> t(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            auto d = rips_threshold(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
            if (d <= max_scale) {
                nbrs[static_cast<std::size_t>(i)].push_back(j);
            }
            t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
            t[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
        }

    Bifiltration bif;
    std::vector<int> clique;
    std::function<void(Rational, Rational)> expand = [&](Rational gx, Rational gy) {
        bif.simplices.push_back({clique, {gx, gy}});
        if (static_cast<int>(clique.size()) > max_dim) return;
        const int last = clique.back();
        for (int w : nbrs[static_cast<std::size_t>(last)]) {
            bool ok = true;
            Rational ny = gy;
            for (int c : clique) {
                const auto& d = t[static_cast<std::size_t>(c)][static_cast<std::size_t>(w)];
                if (d > max_scale) {
                    ok = false;
                    break;
                }
                if (d > ny) ny = d;
            }
            if (!ok) continue;
            Rational nx = gx;
            if (codensity[static_cast<std::size_t>(w)] > nx) nx = codensity[static_cast<std::size_t>(w)];
            clique.push_back(w);
            expand(nx, ny);
            clique.pop_back();
        }
    };
    for (int v = 0; v < n; ++v) {
        clique = {v};
        expand(codensity[static_cast<std::size_t>(v)], Rational(0));
    }
    return bif;
}

// ---------------------------------------------------------------------------
// FI-reps

FIRep firep_from_bifiltration(const Bifiltration& bif, int degree) {
    if (degree < 0) throw InputError("negative homology degree");
    auto collect = [&](int dim) {
        std::vector<const Simplex*> out;
        for (const auto& s : bif.simplices)
            if (s.dim() == dim) out.push_back(&s);
        std::sort(out.begin(), out.end(), [](const Simplex* a, const Simplex* b) { return simplex_order(*a, *b); });
        return out;
    };
    auto lower = collect(degree - 1);
    auto mid = collect(degree);
    auto upper = collect(degree + 1);

    auto boundary = [](const std::vector<const Simplex*>& faces, const std::vector<const Simplex*>& cells) {
        std::map<std::vector<int>, Index> pos;
        for (std::size_t i = 0; i < faces.size(); ++i) pos.emplace(faces[i]->vertices, static_cast<Index>(i));
        GF2Matrix m(static_cast<Index>(faces.size()), 0);
        for (const Simplex* c : cells) {
            std::vector<Index> col;
            if (c->vertices.size() > 1) {
                for (std::size_t drop = 0; drop < c->vertices.size(); ++drop) {
                    std::vector<int> face;
                    for (std::size_t i = 0; i < c->vertices.size(); ++i)
                        if (i != drop) face.push_back(c->vertices[i]);
                    auto it = pos.find(face);
                    if (it == pos.end()) throw InputError("missing face " + vertex_string(face));
                    col.push_back(it->second);
                }
            }
            m.append_column(std::move(col));
        }
        return m;
    };

    FIRep rep;
    rep.m0 = static_cast<Index>(lower.size());
    for (auto* s : mid) rep.gr1.push_back(s->grade);
    for (auto* s : upper) rep.gr2.push_back(s->grade);
    rep.d1 = boundary(lower, mid);
    rep.d2 = boundary(mid, upper);
    return rep;
}

FIRep parse_firep(std::string_view text) {
    auto lines = content_lines(text);
    if (lines.empty() || lines[0].text != "firep") throw InputError("line 1: expected 'firep'");
    if (lines.size() < 2) throw InputError("missing size line");
    auto sizes = split_ws(lines[1].text);
    if (sizes.size() != 3) fail_at(lines[1].number, "expected 'm0 m1 m2'");
    const Index m0 = static_cast<Index>(parse_int_at(lines[1].number, sizes[0]));
    const Index m1 = static_cast<Index>(parse_int_at(lines[1].number, sizes[1]));
    const Index m2 = static_cast<Index>(parse_int_at(lines[1].number, sizes[2]));
    if (lines.size() != 2 + static_cast<std::size_t>(m1) + static_cast<std::size_t>(m2))
        throw InputError("expected " + std::to_string(m1 + m2) + " column lines, found " +
                         std::to_string(lines.size() - 2));
    FIRep rep;
    rep.m0 = m0;
    rep.d1 = GF2Matrix(m0, 0);
    rep.d2 = GF2Matrix(m1, 0);
    for (std::size_t k = 2; k < lines.size(); ++k) {
        const bool first = k < 2 + static_cast<std::size_t>(m1);
        auto [lhs, rhs] = split_semicolon(lines[k]);
        if (lhs.size() != 2) fail_at(lines[k].number, "expected 'x y' before ';'");
        Bigrade g{parse_at(lines[k].number, lhs[0]), parse_at(lines[k].number, lhs[1])};
        const Index bound = first ? m0 : m1;
        std::vector<Index> col;
        for (const auto& t : rhs) {
            long r = parse_int_at(lines[k].number, t);
            if (r < 1 || r > bound) fail_at(lines[k].number, "row index " + t + " out of range");
            col.push_back(static_cast<Index>(r - 1));
        }
        std::sort(col.begin(), col.end());
        if (std::adjacent_find(col.begin(), col.end()) != col.end()) fail_at(lines[k].number, "repeated row index");
        if (first) {
            rep.gr1.push_back(std::move(g));
            rep.d1.append_column(std::move(col));
        } else {
            rep.gr2.push_back(std::move(g));
            rep.d2.append_column(std::move(col));
        }
    }
    rep.validate();
    return rep;
}

std::string write_firep(const FIRep& rep) {
    std::ostringstream out;
    out << "firep\n" << rep.m0 << ' ' << rep.m1() << ' ' << rep.m2() << '\n';
    auto emit = [&](const Bigrade& g, const std::vector<Index>& col) {
        out << to_short_string(g.x) << ' ' << to_short_string(g.y) << " ;";
        for (Index r : col) out << ' ' << r + 1;
        out << '\n';
    };
    for (Index j = 0; j < rep.m1(); ++j) emit(rep.gr1[static_cast<std::size_t>(j)], rep.d1.column(j));
    for (Index j = 0; j < rep.m2(); ++j) emit(rep.gr2[static_cast<std::size_t>(j)], rep.d2.column(j));
    return out.str();
}

FIRep parse_module_text(std::string_view text, int degree) {
    auto lines = content_lines(text);
    if (lines.empty()) throw InputError("empty input");
    if (lines[0].text == "firep") return parse_firep(text);
    if (lines[0].text == "bifiltration") return firep_from_bifiltration(parse_bifiltration(text), degree);
    throw InputError("line " + std::to_string(lines[0].number) + ": expected 'bifiltration' or 'firep'");
}

// ---------------------------------------------------------------------------
// grade transforms

FIRep sort_colex(const FIRep& rep) {
    auto order = [](const std::vector<Bigrade>& g) {
        std::vector<Index> p(g.size());
        std::iota(p.begin(), p.end(), 0);
        std::stable_sort(p.begin(), p.end(), [&](Index a, Index b) {
            return colex_less(g[static_cast<std::size_t>(a)], g[static_cast<std::size_t>(b)]);
        });
        return p;
    };
    auto p1 = order(rep.gr1);
    auto p2 = order(rep.gr2);
    FIRep out;
    out.m0 = rep.m0;
    for (Index j : p1) out.gr1.push_back(rep.gr1[static_cast<std::size_t>(j)]);
    for (Index j : p2) out.gr2.push_back(rep.gr2[static_cast<std::size_t>(j)]);
    out.d1 = rep.d1.select_columns(p1);
    out.d2 = rep.d2.select_columns(p2).permute_rows(inverse(p1));
    return out;
}

FIRep trim(const FIRep& rep, const Bigrade& bound) {
    std::vector<Index> keep1, keep2;
    for (Index j = 0; j < rep.m1(); ++j)
        if (leq(rep.gr1[static_cast<std::size_t>(j)], bound)) keep1.push_back(j);
    for (Index j = 0; j < rep.m2(); ++j)
        if (leq(rep.gr2[static_cast<std::size_t>(j)], bound)) keep2.push_back(j);
    return restrict_columns(rep, keep1, keep2);
}

FIRep coarsen(const FIRep& rep, const Grid2& grid) {
    auto ceil_onto = [](const std::vector<Rational>& values, const Rational& v, const char* axis) {
        auto it = std::lower_bound(values.begin(), values.end(), v);
        if (it == values.end())
            throw InputError(std::string("grade ") + to_short_string(v) + " exceeds the " + axis + " extent of the grid");
        return *it;
    };
    auto snap = [&](const Bigrade& g) { return Bigrade{ceil_onto(grid.xs, g.x, "x"), ceil_onto(grid.ys, g.y, "y")}; };
    FIRep out = rep;
    for (auto& g : out.gr1) g = snap(g);
    for (auto& g : out.gr2) g = snap(g);
    return out;
}

std::vector<Rational> uniform_values(const Rational& lo, const Rational& hi, int n) {
    if (n < 1) throw InputError("bin count must be positive");
    if (n == 1) return {hi};
    std::vector<Rational> out;
    for (int i = 0; i < n; ++i) {
        Rational v = lo + (hi - lo) * Rational(i, n - 1);
        v.canonicalize();
        out.push_back(v);
    }
    return out;
}

std::optional<std::pair<Bigrade, Bigrade>> grade_bounds(const FIRep& rep) {
    std::optional<std::pair<Bigrade, Bigrade>> b;
    auto add = [&](const Bigrade& g) {
        if (!b)
            b = std::make_pair(g, g);
        else
            b = std::make_pair(glb(b->first, g), lub(b->second, g));
    };
    for (const auto& g : rep.gr1) add(g);
    for (const auto& g : rep.gr2) add(g);
    return b;
}

GridFIRep discretize(const FIRep& rep) {
    std::set<Rational> xs, ys;
    for (const auto* gs : {&rep.gr1, &rep.gr2})
        for (const auto& g : *gs) {
            xs.insert(g.x);
            ys.insert(g.y);
        }
    GridFIRep out;
    out.grid.xs.assign(xs.begin(), xs.end());
    out.grid.ys.assign(ys.begin(), ys.end());
    auto index = [&](const Bigrade& g) {
        auto ix = std::lower_bound(out.grid.xs.begin(), out.grid.xs.end(), g.x) - out.grid.xs.begin();
        auto iy = std::lower_bound(out.grid.ys.begin(), out.grid.ys.end(), g.y) - out.grid.ys.begin();
        return GridPoint{static_cast<int>(ix), static_cast<int>(iy)};
    };
    out.m0 = rep.m0;
    for (const auto& g : rep.gr1) out.gr1.push_back(index(g));
    for (const auto& g : rep.gr2) out.gr2.push_back(index(g));
    out.d1 = rep.d1;
    out.d2 = rep.d2;
    return out;
}

FIRep undiscretize(const GridFIRep& rep) {
    FIRep out;
    out.m0 = rep.m0;
    for (auto p : rep.gr1) out.gr1.push_back(rep.grid.at(p));
    for (auto p : rep.gr2) out.gr2.push_back(rep.grid.at(p));
    out.d1 = rep.d1;
    out.d2 = rep.d2;
    return out;
}

FIRep simplify(const FIRep& rep) {
    const Index m1 = rep.m1();
    const Index m2 = rep.m2();
    std::vector<std::vector<Index>> cols(static_cast<std::size_t>(m2));
    std::vector<std::vector<Index>> occurs(static_cast<std::size_t>(m1));
    for (Index j = 0; j < m2; ++j) {
        cols[static_cast<std::size_t>(j)] = rep.d2.column(j);
        for (Index r : rep.d2.column(j)) occurs[static_cast<std::size_t>(r)].push_back(j);
    }
    std::vector<char> row_alive(static_cast<std::size_t>(m1), 1), col_alive(static_cast<std::size_t>(m2), 1);

    auto xor_into = [](std::vector<Index>& dst, const std::vector<Index>& src) {
        std::vector<Index> out;
        out.reserve(dst.size() + src.size());
        std::set_symmetric_difference(dst.begin(), dst.end(), src.begin(), src.end(), std::back_inserter(out));
        dst.swap(out);
    };

    for (Index t = 0; t < m2; ++t) {
        auto& col = cols[static_cast<std::size_t>(t)];
        if (col.empty()) {
            col_alive[static_cast<std::size_t>(t)] = 0;
            continue;
        }
        Index pivot = -1;
        for (auto it = col.rbegin(); it != col.rend(); ++it)
            if (rep.gr1[static_cast<std::size_t>(*it)] == rep.gr2[static_cast<std::size_t>(t)]) {
                pivot = *it;
                break;
            }
        if (pivot < 0) continue;
        const std::vector<Index> pivot_col = col;
        auto users = std::move(occurs[static_cast<std::size_t>(pivot)]);
        std::sort(users.begin(), users.end());
        users.erase(std::unique(users.begin(), users.end()), users.end());
        for (Index u : users) {
            if (u == t || !col_alive[static_cast<std::size_t>(u)]) continue;
            auto& other = cols[static_cast<std::size_t>(u)];
            if (!std::binary_search(other.begin(), other.end(), pivot)) continue;
            xor_into(other, pivot_col);
            for (Index r : pivot_col)
                if (r != pivot) occurs[static_cast<std::size_t>(r)].push_back(u);
        }
        col_alive[static_cast<std::size_t>(t)] = 0;
        row_alive[static_cast<std::size_t>(pivot)] = 0;
    }

    std::vector<Index> keep1, keep2;
    for (Index i = 0; i < m1; ++i)
        if (row_alive[static_cast<std::size_t>(i)]) keep1.push_back(i);
    for (Index j = 0; j < m2; ++j)
        if (col_alive[static_cast<std::size_t>(j)] && !cols[static_cast<std::size_t>(j)].empty()) keep2.push_back(j);

    FIRep reduced = rep;
    for (Index j = 0; j < m2; ++j) reduced.d2.set_column(j, cols[static_cast<std::size_t>(j)]);
    return restrict_columns(reduced, keep1, keep2);
}

}  // namespace bifiber
