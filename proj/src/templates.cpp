#include "bifiber/templates.hpp"

#include "bifiber/errors.hpp"
#include "bifiber/line.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace bifiber {

BarcodeTemplate canonical_template(std::vector<TemplateBar> bars) {
    auto less = [](const TemplateBar& a, const TemplateBar& b) {
        if (a.birth != b.birth) return lex_less(a.birth, b.birth);
        if (!a.death || !b.death) return a.death.has_value() && !b.death.has_value();
        return lex_less(*a.death, *b.death);
    };
    std::sort(bars.begin(), bars.end(), less);
    BarcodeTemplate out;
    for (auto& b : bars) {
        if (!out.empty() && out.back().birth == b.birth && out.back().death == b.death)
            out.back().multiplicity += b.multiplicity;
        else
            out.push_back(std::move(b));
    }
    return out;
}

void AugmentedArrangement::rebuild_indices() {
    locator = Locator(dcel);
    vertical = VerticalLookup(dcel);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

GridPoint entry_point(const TemplateInput& in, int entry) {
    return in.xi.entries[static_cast<std::size_t>(entry)].point;
}

const std::vector<GridPoint>& grades(const TemplateInput& in, int side) {
    return side == 0 ? in.rep.gr1 : in.rep.gr2;
}

std::vector<Index> inverse(const std::vector<Index>& p) {
    std::vector<Index> inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[static_cast<std::size_t>(p[i])] = static_cast<Index>(i);
    return inv;
}

GF2Matrix permuted_d1(const GridFIRep& rep, const std::vector<Index>& sig_inv1) {
    return rep.d1.select_columns(sig_inv1);
}

GF2Matrix permuted_d2(const GridFIRep& rep, const std::vector<Index>& sig1, const std::vector<Index>& sig_inv2) {
    return rep.d2.select_columns(sig_inv2).permute_rows(sig1);
}

// Bars of the current cell from pairs/ess on the permuted matrices.
BarcodeTemplate read_bars(const TemplateInput& in, const PairsEss& pe, const std::array<std::vector<Index>, 2>& sig_inv,
                          const std::array<std::vector<int>, 2>& lift) {
    std::vector<TemplateBar> bars;
    auto at = [&](int side, Index pos) {
        const Index col = sig_inv[static_cast<std::size_t>(side)][static_cast<std::size_t>(pos)];
        return lift[static_cast<std::size_t>(side)][static_cast<std::size_t>(col)];
    };
    for (auto [i, j] : pe.pairs) {
        const int b = at(0, i);
        const int d = at(1, j);
        if (b == d) continue;
        bars.push_back({in.rep.grid.at(entry_point(in, b)), in.rep.grid.at(entry_point(in, d)), 1});
    }
    for (Index i : pe.ess) bars.push_back({in.rep.grid.at(entry_point(in, at(0, i))), std::nullopt, 1});
    return canonical_template(std::move(bars));
}

LineSpec representative_line(const TemplateInput& in, int face) {
    return dual_p(in.dcel.interior_point(face)).translated(-in.shift, Rational(0));
}

GridFIRep trim_grid(const GridFIRep& rep, GridPoint bound) {
    std::vector<Index> keep1, keep2;
    for (Index j = 0; j < rep.m1(); ++j)
        if (leq(rep.gr1[static_cast<std::size_t>(j)], bound)) keep1.push_back(j);
    for (Index j = 0; j < rep.m2(); ++j)
        if (leq(rep.gr2[static_cast<std::size_t>(j)], bound)) keep2.push_back(j);
    GridFIRep out;
    out.grid = rep.grid;
    out.m0 = rep.m0;
    for (Index j : keep1) out.gr1.push_back(rep.gr1[static_cast<std::size_t>(j)]);
    for (Index j : keep2) out.gr2.push_back(rep.gr2[static_cast<std::size_t>(j)]);
    out.d1 = rep.d1.select_columns(keep1);
    out.d2 = rep.d2.select_columns(keep2).select_rows(keep1);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<int> cell_chain(const TemplateInput& in, int face) {
    const LineSpec line = representative_line(in, face);
    std::map<Rational, std::vector<GridPoint>> groups;
    for (auto s : in.support) {
        auto p = push(line, in.rep.grid.at(s));
        check_invariant(p.has_value(), "cell_chain: infinite push on an interior line");
        groups[line_position(line, *p)].push_back(s);
    }
    std::vector<int> chain;
    std::optional<GridPoint> acc;
    for (const auto& [pos, pts] : groups) {
        for (auto s : pts) acc = acc ? lub(*acc, s) : s;
        const int id = in.xi.find(*acc);
        check_invariant(id >= 0, "cell_chain: template point missing from the xi matrix");
        if (chain.empty() || chain.back() != id) chain.push_back(id);
    }
    return chain;
}

int lift_to_chain(const TemplateInput& in, const std::vector<int>& chain, GridPoint g) {
    auto it = std::partition_point(chain.begin(), chain.end(), [&](int e) { return !leq(g, entry_point(in, e)); });
    check_invariant(it != chain.end(), "lift: grade not dominated by the template points");
    return *it;
}

BarcodeTemplate template_from_scratch(const TemplateInput& in, int face) {
    if (in.support.empty()) return {};
    const auto chain = cell_chain(in, face);
    std::map<int, int> rank;
    for (std::size_t i = 0; i < chain.size(); ++i) rank[chain[i]] = static_cast<int>(i);
    std::array<std::vector<int>, 2> lift;
    std::array<std::vector<Index>, 2> sig_inv;
    for (int side = 0; side < 2; ++side) {
        for (auto g : grades(in, side)) lift[static_cast<std::size_t>(side)].push_back(lift_to_chain(in, chain, g));
        auto& order = sig_inv[static_cast<std::size_t>(side)];
        order.resize(lift[static_cast<std::size_t>(side)].size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
            return rank[lift[static_cast<std::size_t>(side)][static_cast<std::size_t>(a)]] <
                   rank[lift[static_cast<std::size_t>(side)][static_cast<std::size_t>(b)]];
        });
    }
    const auto sig1 = inverse(sig_inv[0]);
    RuState ru = reduce_state(permuted_d1(in.rep, sig_inv[0]), permuted_d2(in.rep, sig1, sig_inv[1]), false);
    return read_bars(in, pairs_ess(ru), sig_inv, lift);
}

// ---------------------------------------------------------------------------

Rational CrossingCounts::weight() const {
    Rational quarter(separations[0] + separations[1], 4);
    quarter.canonicalize();
    return Rational(switches[0] + switches[1]) + quarter;
}

std::vector<CrossingCounts> edge_weights(const TemplateInput& in, const DualGraph& graph) {
    std::vector<CrossingCounts> out(in.dcel.lines().size());
    std::vector<char> done(out.size(), 0);
    for (const auto& e : graph.edges) {
        const auto k = static_cast<std::size_t>(e.anchor);
        if (done[k]) continue;
        done[k] = 1;
        const int a = in.anchor_entry[k];
        const auto& entry = in.xi.entries[static_cast<std::size_t>(a)];
        const int u = entry.left;
        const int v = entry.down;
        const auto chain = cell_chain(in, e.lower);
        for (int side = 0; side < 2; ++side) {
            long q[4] = {0, 0, 0, 0};
            for (auto g : grades(in, side)) {
                const int l = lift_to_chain(in, chain, g);
                if (l != a && l != u) continue;
                const bool left = u >= 0 && g.x <= entry_point(in, u).x;
                const bool low = v >= 0 && g.y <= entry_point(in, v).y;
                ++q[left ? (low ? 0 : 1) : (low ? 2 : 3)];
            }
            out[k].switches[side] = q[1] * q[2];
            out[k].separations[side] = q[0] * q[1] + q[2] * q[3] + q[0] * q[2] + q[1] * q[3];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

CellPath compute_path(const DualGraph& graph, const std::vector<Rational>& edge_weight, int start) {
    const int n = graph.node_count;
    CellPath path;
    path.weight = 0;
    path.mst_weight = 0;
    if (n == 0) return path;

    std::vector<int> order(graph.edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return edge_weight[static_cast<std::size_t>(a)] < edge_weight[static_cast<std::size_t>(b)];
    });
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    std::vector<std::vector<std::pair<int, int>>> tree(static_cast<std::size_t>(n));  // (neighbor, edge)
    for (int e : order) {
        const auto& de = graph.edges[static_cast<std::size_t>(e)];
        const int a = root(de.upper), b = root(de.lower);
        if (a == b) continue;
        parent[static_cast<std::size_t>(a)] = b;
        tree[static_cast<std::size_t>(de.upper)].emplace_back(de.lower, e);
        tree[static_cast<std::size_t>(de.lower)].emplace_back(de.upper, e);
        path.mst_weight += edge_weight[static_cast<std::size_t>(e)];
    }

    // Weighted height of every subtree, children ordered shallow to deep.
    std::vector<Rational> height(static_cast<std::size_t>(n));
    std::vector<std::vector<std::pair<int, int>>> children(static_cast<std::size_t>(n));
    std::function<void(int, int)> measure = [&](int node, int from) {
        height[static_cast<std::size_t>(node)] = 0;
        for (auto [nb, e] : tree[static_cast<std::size_t>(node)]) {
            if (nb == from) continue;
            measure(nb, node);
            children[static_cast<std::size_t>(node)].emplace_back(nb, e);
            Rational h = height[static_cast<std::size_t>(nb)] + edge_weight[static_cast<std::size_t>(e)];
            if (h > height[static_cast<std::size_t>(node)]) height[static_cast<std::size_t>(node)] = h;
        }
        auto& ch = children[static_cast<std::size_t>(node)];
        std::stable_sort(ch.begin(), ch.end(), [&](const auto& x, const auto& y) {
            return height[static_cast<std::size_t>(x.first)] + edge_weight[static_cast<std::size_t>(x.second)] <
                   height[static_cast<std::size_t>(y.first)] + edge_weight[static_cast<std::size_t>(y.second)];
        });
    };
    measure(start, -1);

    auto step_to = [&](int from, int to, int e) {
        const auto& de = graph.edges[static_cast<std::size_t>(e)];
        path.steps.push_back({to, e, from == de.lower});
        path.weight += edge_weight[static_cast<std::size_t>(e)];
    };
    path.steps.push_back({start, -1, false});
    std::function<void(int, bool)> walk = [&](int node, bool last) {
        const auto& ch = children[static_cast<std::size_t>(node)];
        for (std::size_t i = 0; i < ch.size(); ++i) {
            const bool final_branch = last && i + 1 == ch.size();
            step_to(node, ch[i].first, ch[i].second);
            walk(ch[i].first, final_branch);
            if (!final_branch) step_to(ch[i].first, node, ch[i].second);
        }
    };
    walk(start, true);
    return path;
}

// ---------------------------------------------------------------------------

Strategy plan_strategy(const std::vector<StepCosts>& costs, bool ru_valid) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = costs.size();
    // State 0: last option A (no U). State 1: last option B or C.
    std::vector<std::array<double, 2>> best(n + 1, {inf, inf});
    std::vector<std::array<std::pair<int, Option>, 2>> back(n + 1);
    best[0][ru_valid ? 1 : 0] = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int s = 0; s < 2; ++s) {
            const double cur = best[i][static_cast<std::size_t>(s)];
            if (cur == inf) continue;
            auto relax = [&](int t, double c, Option o) {
                if (cur + c < best[i + 1][static_cast<std::size_t>(t)]) {
                    best[i + 1][static_cast<std::size_t>(t)] = cur + c;
                    back[i + 1][static_cast<std::size_t>(t)] = {s, o};
                }
            };
            relax(0, costs[i].a, Option::A);
            relax(1, costs[i].b, Option::B);
            if (s == 1) relax(1, costs[i].c, Option::C);
        }
    }
    Strategy out;
    out.choice.resize(n);
    int s = best[n][0] <= best[n][1] ? 0 : 1;
    out.total = best[n][static_cast<std::size_t>(s)];
    for (std::size_t i = n; i > 0; --i) {
        auto [prev, o] = back[i][static_cast<std::size_t>(s)];
        out.choice[i - 1] = o;
        s = prev;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

class Walk {
public:
    Walk(const TemplateInput& in, const BuildOptions& options, BuildStats& stats)
        : in_(in), options_(options), stats_(stats), xi_(in.xi) {}

    void init() {
        std::vector<std::pair<int, int>> rows;  // (y, entry) of rightmost entries, ascending y
        for (int y = 0; y < xi_.ny; ++y)
            if (xi_.rightmost[static_cast<std::size_t>(y)] >= 0) rows.emplace_back(y, xi_.rightmost[static_cast<std::size_t>(y)]);
        for (int side = 0; side < 2; ++side) {
            const auto& gs = grades(in_, side);
            auto& lift = lift_[static_cast<std::size_t>(side)];
            lift.resize(gs.size());
            for (std::size_t c = 0; c < gs.size(); ++c) {
                auto it = std::lower_bound(rows.begin(), rows.end(), gs[c].y,
                                           [](const std::pair<int, int>& r, int y) { return r.first < y; });
                while (it != rows.end() && entry_point(in_, it->second).x < gs[c].x) ++it;
                check_invariant(it != rows.end(), "initial lift: grade outside box(S)");
                lift[c] = it->second;
                low(it->second, side).push_back(static_cast<Index>(c));
            }
            auto& order = sig_inv_[static_cast<std::size_t>(side)];
            order.clear();
            for (const auto& r : rows)
                for (Index c : low(r.second, side)) order.push_back(c);
            sig_[static_cast<std::size_t>(side)] = inverse(order);
        }
        if (options_.check) {
            const auto chain = cell_chain(in_, in_.dcel.top_face());
            for (int side = 0; side < 2; ++side) {
                const auto& gs = grades(in_, side);
                for (std::size_t c = 0; c < gs.size(); ++c)
                    check_invariant(lift_[static_cast<std::size_t>(side)][c] == lift_to_chain(in_, chain, gs[c]),
                                    "initial lift differs from the direct definition");
            }
        }
    }

    GF2Matrix d1() const { return permuted_d1(in_.rep, sig_inv_[0]); }
    GF2Matrix d2() const { return permuted_d2(in_.rep, sig_[0], sig_inv_[1]); }

    void reduce_full() {
        ru_ = reduce_state(d1(), d2(), true);
        ru_valid_ = true;
    }

    BarcodeTemplate reduce_pairs_only() {
        RuState tmp = reduce_state(d1(), d2(), false);
        ru_valid_ = false;
        return read_bars(in_, pairs_ess(tmp), sig_inv_, lift_);
    }

    BarcodeTemplate read() const { return read_bars(in_, pairs_ess(ru_), sig_inv_, lift_); }

    void invalidate() { ru_valid_ = false; }
    bool ru_valid() const { return ru_valid_; }
    const RuState& ru() const { return ru_; }

    /// Updates lifts and Low lists across a dcel line, then restores the
    /// sort order, with vineyard updates if `vine`.
    void cross(int line, bool up, bool vine) {
        const int a = in_.anchor_entry[static_cast<std::size_t>(line)];
        const auto& entry = xi_.entries[static_cast<std::size_t>(a)];
        const int u = entry.left;
        const int v = entry.down;
        for (int side = 0; side < 2; ++side) {
            const auto& gs = grades(in_, side);
            const int from_other = up ? u : v;
            std::vector<Index> moving = low(a, side);
            low(a, side).clear();
            if (from_other >= 0) {
                auto& other = low(from_other, side);
                moving.insert(moving.end(), other.begin(), other.end());
                other.clear();
            }
            for (Index c : moving) {
                const GridPoint g = gs[static_cast<std::size_t>(c)];
                int target = a;
                if (up && v >= 0 && g.y <= entry_point(in_, v).y) target = v;
                if (!up && u >= 0 && g.x <= entry_point(in_, u).x) target = u;
                lift_[static_cast<std::size_t>(side)][static_cast<std::size_t>(c)] = target;
                low(target, side).push_back(c);
            }
            for (int e : {a, u, v})
                if (e >= 0) std::sort(low(e, side).begin(), low(e, side).end());
            sort_side(side, vine);
        }
    }

    void check(BarcodeTemplate* expected) {
        ++stats_.checks;
        for (int side = 0; side < 2; ++side) {
            const auto& order = sig_inv_[static_cast<std::size_t>(side)];
            const auto& sig = sig_[static_cast<std::size_t>(side)];
            for (std::size_t p = 0; p < order.size(); ++p)
                check_invariant(sig[static_cast<std::size_t>(order[p])] == static_cast<Index>(p),
                                "permutation arrays are not mutually inverse");
            for (std::size_t p = 1; p < order.size(); ++p)
                check_invariant(!key_less(side, order[p], order[p - 1]), "columns not sorted by lift");
        }
        if (ru_valid_) check_ru("cell");
        (void)expected;
    }

    // D = RU for both matrices and pairs/ess equal to a fresh reduction.
    void check_ru(const char* where) const {
        const GF2Matrix a = d1(), b = d2();
        auto why = check_decomposition(a, ru_.first);
        check_invariant(why.empty(), std::string("RU check for D1 failed at ") + where + ": " + why);
        why = check_decomposition(b, ru_.second);
        check_invariant(why.empty(), std::string("RU check for D2 failed at ") + where + ": " + why);
        const PairsEss got = pairs_ess(ru_), want = pairs_ess(reduce_state(a, b, false));
        check_invariant(got.pairs == want.pairs && got.ess == want.ess,
                        std::string("pairs differ from a fresh reduction at ") + where);
    }

private:
    std::vector<Index>& low(int entry, int side) {
        return xi_.entries[static_cast<std::size_t>(entry)].low[static_cast<std::size_t>(side)];
    }

    bool key_less(int side, Index a, Index b) const {
        const auto& lift = lift_[static_cast<std::size_t>(side)];
        return colex_less(entry_point(in_, lift[static_cast<std::size_t>(a)]),
                          entry_point(in_, lift[static_cast<std::size_t>(b)]));
    }

    void sort_side(int side, bool vine) {
        auto& order = sig_inv_[static_cast<std::size_t>(side)];
        auto& sig = sig_[static_cast<std::size_t>(side)];
        for (std::size_t i = 1; i < order.size(); ++i) {
            for (std::size_t cur = i; cur > 0 && key_less(side, order[cur], order[cur - 1]); --cur) {
                std::swap(order[cur - 1], order[cur]);
                sig[static_cast<std::size_t>(order[cur - 1])] = static_cast<Index>(cur - 1);
                sig[static_cast<std::size_t>(order[cur])] = static_cast<Index>(cur);
                ++stats_.transpositions;
                if (vine) {
                    vineyard_transpose(ru_, side == 0 ? Side::Left : Side::Right, static_cast<Index>(cur - 1));
                    if (options_.check) {
                        check_ru("transposition");
                        ++stats_.transition_checks;
                    }
                }
            }
        }
    }

    const TemplateInput& in_;
    const BuildOptions& options_;
    BuildStats& stats_;
    XiMatrix xi_;
    std::array<std::vector<int>, 2> lift_;
    std::array<std::vector<Index>, 2> sig_;
    std::array<std::vector<Index>, 2> sig_inv_;
    RuState ru_;
    bool ru_valid_ = false;
};

struct CostModel {
    double a = 0;
    double b = 0;
    double vine[2] = {0, 0};
};

CostModel calibrate(const RuState& ru, int updates, double time_a, double time_b) {
    CostModel m;
    m.a = time_a;
    m.b = time_b;
    std::mt19937 rng(12345);
    for (int side = 0; side < 2; ++side) {
        const Index n = side == 0 ? ru.first.cols : ru.second.cols;
        if (n < 2 || updates <= 0) continue;
        RuState copy = ru;
        const int count = updates / 2;
        std::uniform_int_distribution<Index> pick(0, n - 2);
        const auto t0 = Clock::now();
        for (int i = 0; i < count; ++i) vineyard_transpose(copy, side == 0 ? Side::Left : Side::Right, pick(rng));
        m.vine[side] = seconds_since(t0) / std::max(1, count);
    }
    return m;
}

}  // namespace

std::vector<BarcodeTemplate> compute_templates(const TemplateInput& in, const BuildOptions& options, BuildStats* stats_out) {
    BuildStats local;
    BuildStats& stats = stats_out ? *stats_out : local;
    stats = BuildStats{};
    const auto& dcel = in.dcel;
    const std::size_t faces = dcel.faces().size();
    stats.face_count = faces;
    stats.anchor_count = dcel.lines().size();
    stats.m1 = in.rep.m1();
    stats.m2 = in.rep.m2();
    std::vector<std::optional<BarcodeTemplate>> templates(faces);

    if (in.support.empty()) {
        for (auto& t : templates) t = BarcodeTemplate{};
        std::vector<BarcodeTemplate> out;
        for (auto& t : templates) out.push_back(std::move(*t));
        return out;
    }

    const DualGraph graph = dual_graph(dcel);
    const auto counts = edge_weights(in, graph);
    std::vector<Rational> weights;
    for (const auto& e : graph.edges) weights.push_back(counts[static_cast<std::size_t>(e.anchor)].weight());
    const CellPath path = compute_path(graph, weights, dcel.top_face());
    stats.path_weight = path.weight;
    stats.mst_weight = path.mst_weight;
    const std::size_t n = path.steps.size();
    stats.steps = static_cast<long>(n);

    std::vector<char> repeated(n, 0);
    {
        std::vector<char> seen(faces, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(path.steps[i].cell);
            repeated[i] = seen[c];
            seen[c] = 1;
        }
    }

    Walk walk(in, options, stats);
    walk.init();

    std::vector<Option> plan(n, Option::B);
    CostModel model;
    auto step_costs = [&](std::size_t from) {
        std::vector<StepCosts> costs;
        for (std::size_t i = from; i < n; ++i) {
            StepCosts c;
            c.a = repeated[i] ? 0.0 : model.a;
            c.b = model.b;
            if (i == 0) {
                c.c = std::numeric_limits<double>::infinity();
            } else {
                const auto& w = counts[static_cast<std::size_t>(graph.edges[static_cast<std::size_t>(path.steps[i].edge)].anchor)];
                c.c = 0;
                for (int s = 0; s < 2; ++s)
                    c.c += model.vine[s] * (static_cast<double>(w.switches[s]) + 0.25 * static_cast<double>(w.separations[s]));
            }
            costs.push_back(c);
        }
        return costs;
    };

    // Step 0 always reduces fully, which also provides the calibration baseline.
    auto t0 = Clock::now();
    walk.reduce_full();
    const double time_b = seconds_since(t0);
    if (options.mode == StrategyMode::Auto) {
        t0 = Clock::now();
        (void)walk.reduce_pairs_only();
        const double time_a = seconds_since(t0);
        walk.reduce_full();
        model = calibrate(walk.ru(), options.calibration_updates, time_a, time_b);
        auto s = plan_strategy(step_costs(0));
        plan = s.choice;
        plan[0] = Option::B;
    } else if (options.mode == StrategyMode::AllC) {
        for (std::size_t i = 1; i < n; ++i) plan[i] = Option::C;
    }

    auto record = [&](std::size_t i, BarcodeTemplate t) {
        const auto c = static_cast<std::size_t>(path.steps[i].cell);
        if (!templates[c]) templates[c] = std::move(t);
    };

    // Observed costs for re-planning.
    double spent_b = time_b, spent_c = 0;
    long count_b = 1, vine_steps = 0;
    const std::size_t replan_every = std::max<std::size_t>(1, n / 20);

    for (std::size_t i = 0; i < n; ++i) {
        const Option o = plan[i];
        ++stats.option_count[static_cast<int>(o)];
        const auto& step = path.steps[i];
        const auto start = Clock::now();
        const long trans_before = stats.transpositions;
        if (i > 0) {
            check_invariant(o != Option::C || walk.ru_valid(), "strategy: option C without a valid decomposition");
            const int line = graph.edges[static_cast<std::size_t>(step.edge)].anchor;
            walk.cross(line, step.up, o == Option::C);
        }
        if (o == Option::A) {
            if (!repeated[i]) record(i, walk.reduce_pairs_only());
            walk.invalidate();
        } else {
            if (o == Option::B && i > 0) {
                walk.reduce_full();
                spent_b += seconds_since(start);
                ++count_b;
            }
            if (o == Option::C) {
                spent_c += seconds_since(start);
                vine_steps += stats.transpositions - trans_before;
            }
            if (!repeated[i]) record(i, walk.read());
        }
        if (options.check) {
            walk.check(nullptr);
            const auto cell = step.cell;
            const auto expected = template_from_scratch(in, cell);
            check_invariant(*templates[static_cast<std::size_t>(cell)] == expected ||
                                repeated[i],
                            "template differs from direct computation at cell " + std::to_string(cell));
            if (repeated[i] && walk.ru_valid())
                check_invariant(walk.read() == expected,
                                "template differs from direct computation at revisited cell " + std::to_string(cell));
        }
        if (options.mode == StrategyMode::Auto && options.replan && i + 1 < n && (i + 1) % replan_every == 0) {
            model.b = spent_b / static_cast<double>(count_b);
            if (vine_steps > 0) {
                const double per = spent_c / static_cast<double>(vine_steps);
                const double total = model.vine[0] + model.vine[1];
                if (total > 0) {
                    model.vine[0] = per * 2 * model.vine[0] / total;
                    model.vine[1] = per * 2 * model.vine[1] / total;
                }
            }
            auto s = plan_strategy(step_costs(i + 1), walk.ru_valid());
            std::copy(s.choice.begin(), s.choice.end(), plan.begin() + static_cast<std::ptrdiff_t>(i + 1));
        }
    }

    std::vector<BarcodeTemplate> out;
    for (std::size_t f = 0; f < faces; ++f) {
        check_invariant(templates[f].has_value(), "cell " + std::to_string(f) + " was never visited");
        std::size_t size = 0;
        for (const auto& bar : *templates[f]) size += static_cast<std::size_t>(bar.multiplicity);
        stats.max_template_size = std::max(stats.max_template_size, size);
        stats.total_template_entries += templates[f]->size();
        out.push_back(std::move(*templates[f]));
    }
    return out;
}

TemplateInput prepare_templates(const GridFIRep& rep, const BettiTable& betti) {
    TemplateInput in;
    in.support = support_points(betti);
    in.shift = 0;
    if (in.support.empty()) {
        in.rep.grid = rep.grid;
        in.rep.m0 = rep.m0;
        in.rep.d1 = GF2Matrix(rep.m0, 0);
        in.rep.d2 = GF2Matrix(0, 0);
        in.xi = build_xi_matrix(rep.grid.nx(), rep.grid.ny(), {});
        in.dcel = Dcel::build({});
        return in;
    }
    GridPoint bound = in.support.front();
    for (auto s : in.support) bound = lub(bound, s);
    in.rep = trim_grid(rep, bound);
    in.xi = build_xi_matrix(rep.grid.nx(), rep.grid.ny(), in.support);

    Rational min_x = rep.grid.at(in.support.front()).x;
    for (auto s : in.support) min_x = std::min(min_x, rep.grid.at(s).x);
    if (min_x < 0) in.shift = -min_x;

    std::vector<AnchorLine> lines;
    for (std::size_t e = 0; e < in.xi.entries.size(); ++e) {
        if (!in.xi.entries[e].anchor) continue;
        const Bigrade a = rep.grid.at(in.xi.entries[e].point);
        lines.push_back({a.x + in.shift, a.y});
        in.anchor_entry.push_back(static_cast<int>(e));
    }
    in.dcel = Dcel::build(lines);
    return in;
}

AugmentedArrangement compute_augmented_arrangement(const FIRep& input, const BuildOptions& options, BuildStats* stats) {
    input.validate();
    const FIRep sorted = sort_colex(input);
    AugmentedArrangement aug;
    if (auto b = grade_bounds(sorted)) {
        aug.has_bounds = true;
        aug.lower = b->first;
        aug.upper = b->second;
    }
    const FIRep work = options.simplify ? simplify(sorted) : sorted;
    const GridFIRep grid = discretize(work);
    aug.betti = betti_numbers(grid, &aug.dims);
    TemplateInput in = prepare_templates(grid, aug.betti);
    aug.shift = in.shift;
    aug.m1 = in.rep.m1();
    aug.m2 = in.rep.m2();
    for (auto s : in.support) aug.support.push_back(grid.grid.at(s));
    {
        std::set<int> xs, ys;
        for (auto s : in.support) {
            xs.insert(s.x);
            ys.insert(s.y);
        }
        aug.kappa_x = static_cast<int>(xs.size());
        aug.kappa_y = static_cast<int>(ys.size());
    }
    for (int e : in.anchor_entry) aug.anchors.push_back(grid.grid.at(in.xi.entries[static_cast<std::size_t>(e)].point));
    aug.templates = compute_templates(in, options, stats);
    aug.dcel = std::move(in.dcel);
    aug.rebuild_indices();
    return aug;
}

FIRep coarsen_uniform(const FIRep& rep, int nx, int ny) {
    auto b = grade_bounds(rep);
    if (!b) return rep;
    Grid2 grid{uniform_values(b->first.x, b->second.x, nx), uniform_values(b->first.y, b->second.y, ny)};
    return coarsen(rep, grid);
}

}  // namespace bifiber
