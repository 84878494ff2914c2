#include "bifiber/arrangement.hpp"

#include "bifiber/errors.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace bifiber {

DualPoint dual_ell(const LineSpec& line) {
    if (line.is_vertical()) throw InputError("vertical lines have no dual point");
    return {line.slope, -line.intercept};
}

LineSpec dual_p(const DualPoint& p) { return LineSpec::finite(p.x, -p.y); }

// ---------------------------------------------------------------------------

std::vector<GridPoint> XiMatrix::anchors() const {
    std::vector<GridPoint> out;
    for (const auto& e : entries)
        if (e.anchor) out.push_back(e.point);
    return out;
}

XiMatrix build_xi_matrix(int nx, int ny, const std::vector<GridPoint>& support) {
    XiMatrix xi;
    xi.nx = nx;
    xi.ny = ny;
    xi.rightmost.assign(static_cast<std::size_t>(ny), -1);
    if (support.empty()) return xi;
    std::set<GridPoint> s(support.begin(), support.end());
    for (int x = 0; x < nx; ++x) {
        int column = -1;
        for (int y = 0; y < ny; ++y) {
            const GridPoint p{x, y};
            const bool in_s = s.count(p) > 0;
            const int row = xi.rightmost[static_cast<std::size_t>(y)];
            const bool anchor = (row >= 0 && column >= 0) || (in_s && (row >= 0 || column >= 0));
            if (!in_s && !anchor) continue;
            XiEntry e;
            e.point = p;
            e.left = row;
            e.down = column;
            e.support = in_s;
            e.anchor = anchor;
            const int id = static_cast<int>(xi.entries.size());
            xi.entries.push_back(std::move(e));
            xi.index.emplace(p, id);
            xi.rightmost[static_cast<std::size_t>(y)] = id;
            column = id;
        }
    }
    return xi;
}

// ---------------------------------------------------------------------------

namespace {

using Key = std::pair<Rational, Rational>;

// Counterclockwise angular order of direction vectors, starting at (1, 0).
bool angle_less(const Rational& ax, const Rational& ay, const Rational& bx, const Rational& by) {
    auto half = [](const Rational& x, const Rational& y) { return (y > 0 || (y == 0 && x > 0)) ? 0 : 1; };
    const int ha = half(ax, ay);
    const int hb = half(bx, by);
    if (ha != hb) return ha < hb;
    return ax * by - ay * bx > 0;
}

}  // namespace

Dcel Dcel::build(const std::vector<AnchorLine>& lines) {
    Dcel d;
    d.lines_ = lines;
    const std::size_t n = lines.size();

    std::vector<std::vector<Key>> on_line(n);
    Rational xmax = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (lines[i].slope == lines[j].slope) continue;
            Rational x = (lines[i].offset - lines[j].offset) / (lines[i].slope - lines[j].slope);
            if (x <= 0) continue;
            Rational y = lines[i].at(x);
            on_line[i].emplace_back(x, y);
            on_line[j].emplace_back(x, y);
            if (x > xmax) xmax = x;
        }
    d.xmax_ = xmax + 1;
    Rational lo = 0, hi = 0;
    for (const auto& l : lines)
        for (const Rational& y : {l.at(0), l.at(d.xmax_)}) {
            if (y < lo) lo = y;
            if (y > hi) hi = y;
        }
    d.ymin_ = lo - 1;
    d.ymax_ = hi + 1;

    std::map<Key, int> vid;
    auto vertex = [&](const Rational& x, const Rational& y) {
        auto [it, fresh] = vid.emplace(Key{x, y}, static_cast<int>(d.vertices_.size()));
        if (fresh) d.vertices_.push_back({x, y, -1});
        return it->second;
    };
    struct Seg {
        int a, b, anchor;
        EdgeKind kind;
    };
    std::vector<Seg> segs;
    auto chain = [&](std::vector<Key> pts, int anchor, EdgeKind kind, bool by_y) {
        std::sort(pts.begin(), pts.end(), [&](const Key& p, const Key& q) {
            return by_y ? std::tie(p.second, p.first) < std::tie(q.second, q.first) : p < q;
        });
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        for (std::size_t k = 0; k + 1 < pts.size(); ++k)
            segs.push_back({vertex(pts[k].first, pts[k].second), vertex(pts[k + 1].first, pts[k + 1].second), anchor, kind});
    };

    std::vector<Key> left{{Rational(0), d.ymin_}, {Rational(0), d.ymax_}};
    std::vector<Key> right{{d.xmax_, d.ymin_}, {d.xmax_, d.ymax_}};
    for (std::size_t i = 0; i < n; ++i) {
        Key a{Rational(0), lines[i].at(0)};
        Key b{d.xmax_, lines[i].at(d.xmax_)};
        left.push_back(a);
        right.push_back(b);
        auto pts = on_line[i];
        pts.push_back(a);
        pts.push_back(b);
        chain(std::move(pts), static_cast<int>(i), EdgeKind::Line, false);
    }
    chain(left, -1, EdgeKind::Left, true);
    chain(right, -1, EdgeKind::Right, true);
    chain({{Rational(0), d.ymax_}, {d.xmax_, d.ymax_}}, -1, EdgeKind::Top, false);
    chain({{Rational(0), d.ymin_}, {d.xmax_, d.ymin_}}, -1, EdgeKind::Bottom, false);

    d.half_edges_.resize(2 * segs.size());
    for (std::size_t e = 0; e < segs.size(); ++e) {
        auto& h = d.half_edges_[2 * e];
        auto& t = d.half_edges_[2 * e + 1];
        h.origin = segs[e].a;
        t.origin = segs[e].b;
        h.twin = static_cast<int>(2 * e + 1);
        t.twin = static_cast<int>(2 * e);
        h.anchor = t.anchor = segs[e].anchor;
        h.kind = t.kind = segs[e].kind;
    }

    std::vector<std::vector<int>> out(d.vertices_.size());
    for (std::size_t h = 0; h < d.half_edges_.size(); ++h)
        out[static_cast<std::size_t>(d.half_edges_[h].origin)].push_back(static_cast<int>(h));
    std::vector<int> position(d.half_edges_.size());
    for (std::size_t v = 0; v < out.size(); ++v) {
        auto& list = out[v];
        const auto& o = d.vertices_[v];
        std::sort(list.begin(), list.end(), [&](int a, int b) {
            const auto& da = d.dest(a);
            const auto& db = d.dest(b);
            return angle_less(da.x - o.x, da.y - o.y, db.x - o.x, db.y - o.y);
        });
        for (std::size_t k = 0; k < list.size(); ++k) position[static_cast<std::size_t>(list[k])] = static_cast<int>(k);
        if (!list.empty()) d.vertices_[v].incident = list.front();
    }
    for (std::size_t h = 0; h < d.half_edges_.size(); ++h) {
        const int t = d.half_edges_[h].twin;
        const auto& list = out[static_cast<std::size_t>(d.half_edges_[static_cast<std::size_t>(t)].origin)];
        const int deg = static_cast<int>(list.size());
        const int k = position[static_cast<std::size_t>(t)];
        const int nxt = list[static_cast<std::size_t>((k - 1 + deg) % deg)];
        d.half_edges_[h].next = nxt;
        d.half_edges_[static_cast<std::size_t>(nxt)].prev = static_cast<int>(h);
    }

    std::vector<char> seen(d.half_edges_.size(), 0);
    for (std::size_t start = 0; start < d.half_edges_.size(); ++start) {
        if (seen[start]) continue;
        std::vector<int> cycle;
        Rational area2 = 0;
        int h = static_cast<int>(start);
        do {
            seen[static_cast<std::size_t>(h)] = 1;
            cycle.push_back(h);
            const auto& a = d.origin(h);
            const auto& b = d.dest(h);
            area2 += a.x * b.y - b.x * a.y;
            h = d.half_edges_[static_cast<std::size_t>(h)].next;
        } while (h != static_cast<int>(start));
        int face = -1;
        if (area2 > 0) {
            face = static_cast<int>(d.faces_.size());
            d.faces_.push_back({static_cast<int>(start)});
        }
        for (int c : cycle) d.half_edges_[static_cast<std::size_t>(c)].face = face;
    }

    for (std::size_t h = 0; h < d.half_edges_.size(); ++h) {
        const auto& he = d.half_edges_[h];
        if (he.kind == EdgeKind::Top && d.origin(static_cast<int>(h)).x == d.xmax_) d.top_face_ = he.face;
        if (he.kind == EdgeKind::Bottom && d.origin(static_cast<int>(h)).x == 0) d.bottom_face_ = he.face;
    }
    d.validate();
    return d;
}

Dcel Dcel::from_raw(Raw raw) {
    Dcel d;
    d.lines_ = std::move(raw.lines);
    d.vertices_ = std::move(raw.vertices);
    d.half_edges_ = std::move(raw.half_edges);
    d.faces_ = std::move(raw.faces);
    d.xmax_ = std::move(raw.xmax);
    d.ymin_ = std::move(raw.ymin);
    d.ymax_ = std::move(raw.ymax);
    d.top_face_ = raw.top_face;
    d.bottom_face_ = raw.bottom_face;
    d.validate();
    return d;
}

std::vector<int> Dcel::face_cycle(int f) const {
    std::vector<int> out;
    const int start = faces_[static_cast<std::size_t>(f)].boundary;
    int h = start;
    do {
        out.push_back(h);
        h = half_edges_[static_cast<std::size_t>(h)].next;
    } while (h != start);
    return out;
}

DualPoint Dcel::interior_point(int f) const {
    Rational sx = 0, sy = 0;
    const auto cycle = face_cycle(f);
    for (int h : cycle) {
        sx += origin(h).x;
        sy += origin(h).y;
    }
    const Rational k(static_cast<long>(cycle.size()));
    return {sx / k, sy / k};
}

void Dcel::validate() const {
    const int nh = static_cast<int>(half_edges_.size());
    const int nv = static_cast<int>(vertices_.size());
    const int nf = static_cast<int>(faces_.size());
    auto ok_index = [](int i, int n) { return i >= 0 && i < n; };
    for (int h = 0; h < nh; ++h) {
        const auto& e = half_edges_[static_cast<std::size_t>(h)];
        check_invariant(ok_index(e.twin, nh) && ok_index(e.next, nh) && ok_index(e.prev, nh) && ok_index(e.origin, nv),
                        "dcel: dangling half-edge link");
        check_invariant(half_edges_[static_cast<std::size_t>(e.twin)].twin == h, "dcel: twin is not an involution");
        check_invariant(e.twin != h, "dcel: half-edge is its own twin");
        check_invariant(half_edges_[static_cast<std::size_t>(e.next)].prev == h, "dcel: next/prev mismatch");
        check_invariant(half_edges_[static_cast<std::size_t>(e.next)].origin == half_edges_[static_cast<std::size_t>(e.twin)].origin,
                        "dcel: next does not start at the destination");
        check_invariant(half_edges_[static_cast<std::size_t>(e.next)].face == e.face, "dcel: face cycle not closed");
        check_invariant(e.face >= -1 && e.face < nf, "dcel: bad face index");
        check_invariant((e.kind == EdgeKind::Line) == (e.anchor >= 0), "dcel: anchor flag mismatch");
    }
    for (int f = 0; f < nf; ++f) {
        const int b = faces_[static_cast<std::size_t>(f)].boundary;
        check_invariant(ok_index(b, nh) && half_edges_[static_cast<std::size_t>(b)].face == f, "dcel: face boundary mismatch");
    }
    // Bounded faces of a connected planar subdivision: V - E + F = 1.
    check_invariant(nv - nh / 2 + nf == 1, "dcel: Euler characteristic mismatch");
    check_invariant(ok_index(top_face_, nf) && ok_index(bottom_face_, nf), "dcel: bad top/bottom face");
}

// ---------------------------------------------------------------------------

Locator::Locator(const Dcel& dcel) : lines_(dcel.lines()) {
    std::set<Rational> xs;
    for (std::size_t v = 0; v < dcel.vertices().size(); ++v) {
        const auto& vert = dcel.vertices()[v];
        xs.insert(vert.x);
        vertex_index_.emplace(Key{vert.x, vert.y}, static_cast<int>(v));
    }
    xs_.assign(xs.begin(), xs.end());
    slabs_.assign(xs_.size() > 1 ? xs_.size() - 1 : 0, {});
    const auto& hes = dcel.half_edges();
    for (std::size_t h = 0; h < hes.size(); ++h) {
        const auto& e = hes[h];
        if (e.kind == Dcel::EdgeKind::Left || e.kind == Dcel::EdgeKind::Right) continue;
        const auto& a = dcel.origin(static_cast<int>(h));
        const auto& b = dcel.dest(static_cast<int>(h));
        if (!(a.x < b.x)) continue;  // use the left-to-right copy
        SlabEdge se{e.anchor, e.kind == Dcel::EdgeKind::Top ? 1 : (e.kind == Dcel::EdgeKind::Bottom ? -1 : 0), e.face,
                    hes[static_cast<std::size_t>(e.twin)].face};
        auto first = std::lower_bound(xs_.begin(), xs_.end(), a.x) - xs_.begin();
        auto last = std::lower_bound(xs_.begin(), xs_.end(), b.x) - xs_.begin();
        for (auto s = first; s < last; ++s) slabs_[static_cast<std::size_t>(s)].push_back(se);
    }
    for (std::size_t s = 0; s < slabs_.size(); ++s) {
        const Rational mid = (xs_[s] + xs_[s + 1]) / 2;
        auto key = [&](const SlabEdge& e) -> std::pair<int, Rational> {
            if (e.sign != 0) return {e.sign, Rational(0)};
            return {0, lines_[static_cast<std::size_t>(e.line)].at(mid)};
        };
        std::sort(slabs_[s].begin(), slabs_[s].end(),
                  [&](const SlabEdge& p, const SlabEdge& q) { return key(p) < key(q); });
    }
}

int Locator::slab_of(const Rational& x) const {
    const int last = static_cast<int>(slabs_.size()) - 1;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    int s = static_cast<int>(it - xs_.begin()) - 1;
    return std::clamp(s, 0, last);
}

int Locator::compare(const SlabEdge& e, const DualPoint& p) const {
    if (e.sign != 0) return e.sign;
    const Rational v = lines_[static_cast<std::size_t>(e.line)].at(p.x);
    return v < p.y ? -1 : (v == p.y ? 0 : 1);
}

Location Locator::locate(const DualPoint& p) const {
    Location loc;
    std::vector<int> slabs{slab_of(p.x)};
    if (slabs[0] > 0 && p.x == xs_[static_cast<std::size_t>(slabs[0])]) slabs.push_back(slabs[0] - 1);
    bool on_edge = false;
    for (int s : slabs) {
        const auto& edges = slabs_[static_cast<std::size_t>(s)];
        auto it = std::partition_point(edges.begin(), edges.end(), [&](const SlabEdge& e) { return compare(e, p) < 0; });
        if (it == edges.begin()) throw InvariantError("locator: point below the bottom edge");
        if (compare(*it, p) != 0) {
            if (!on_edge && loc.faces.empty()) loc.faces.push_back(std::prev(it)->above);
            continue;
        }
        if (!on_edge) loc.faces.clear();
        on_edge = true;
        for (; it != edges.end() && compare(*it, p) == 0; ++it) {
            loc.faces.push_back(it->above);
            if (it->below >= 0) loc.faces.push_back(it->below);
        }
    }
    std::sort(loc.faces.begin(), loc.faces.end());
    loc.faces.erase(std::unique(loc.faces.begin(), loc.faces.end()), loc.faces.end());
    if (on_edge) loc.kind = vertex_index_.count(Key{p.x, p.y}) ? Location::Kind::Vertex : Location::Kind::Edge;
    return loc;
}

int Locator::face_below_or_at(const DualPoint& p) const {
    const auto& edges = slabs_[static_cast<std::size_t>(slab_of(p.x))];
    auto it = std::partition_point(edges.begin(), edges.end(), [&](const SlabEdge& e) { return compare(e, p) < 0; });
    if (it == edges.begin()) throw InvariantError("locator: point below the bottom edge");
    return std::prev(it)->above;
}

// ---------------------------------------------------------------------------

VerticalLookup::VerticalLookup(const Dcel& dcel) : bottom_face_(dcel.bottom_face()) {
    std::map<Rational, int> top_line;  // slope -> line with the smallest offset
    const auto& lines = dcel.lines();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto [it, fresh] = top_line.emplace(lines[i].slope, static_cast<int>(i));
        if (!fresh && lines[i].offset < lines[static_cast<std::size_t>(it->second)].offset) it->second = static_cast<int>(i);
    }
    const auto& hes = dcel.half_edges();
    for (const auto& [slope, line] : top_line) {
        int face = -1;
        for (std::size_t h = 0; h < hes.size(); ++h)
            if (hes[h].anchor == line && dcel.dest(static_cast<int>(h)).x == dcel.xmax() &&
                dcel.origin(static_cast<int>(h)).x < dcel.xmax())
                face = hes[h].face;
        check_invariant(face >= 0, "vertical lookup: line has no rightmost edge");
        table_.emplace_back(slope, face);
    }
}

int VerticalLookup::lookup(const Rational& x) const {
    auto it = std::upper_bound(table_.begin(), table_.end(), x,
                               [](const Rational& v, const std::pair<Rational, int>& e) { return v < e.first; });
    if (it == table_.begin()) return bottom_face_;
    return std::prev(it)->second;
}

// ---------------------------------------------------------------------------

DualGraph dual_graph(const Dcel& dcel) {
    DualGraph g;
    g.node_count = static_cast<int>(dcel.faces().size());
    std::set<std::pair<int, int>> seen;
    const auto& hes = dcel.half_edges();
    for (std::size_t h = 0; h < hes.size(); ++h) {
        if (hes[h].kind != Dcel::EdgeKind::Line) continue;
        if (!(dcel.origin(static_cast<int>(h)).x < dcel.dest(static_cast<int>(h)).x)) continue;
        const int upper = hes[h].face;
        const int lower = hes[static_cast<std::size_t>(hes[h].twin)].face;
        if (seen.emplace(upper, lower).second) g.edges.push_back({upper, lower, hes[h].anchor});
    }
    return g;
}

}  // namespace bifiber
