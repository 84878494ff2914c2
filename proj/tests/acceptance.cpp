// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include "support.hpp"

#include "bifiber/betti.hpp"
#include "bifiber/serialize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

using namespace bifiber;
using namespace testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    if (!ok) ++failures;
}

std::string fmt(double v, int digits = 2) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

// Random instances shared by several criteria: <= 7 vertices, 5x5 grid,
// degrees 0 and 1.
std::vector<FIRep> random_suite(int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<FIRep> out;
    for (int t = 0; t < count; ++t) out.push_back(random_firep(rng, t % 2, 7, 5));
    return out;
}

// ---------------------------------------------------------------------------

void betti_examples() {
    const auto t0 = Clock::now();
    using Table = std::map<std::pair<Rational, Rational>, int>;
    auto plane = [](const BettiTable& b, const std::map<GridPoint, int>& xi) {
        Table out;
        for (const auto& [p, v] : xi) {
            const Bigrade g = b.grid.at(p);
            out[{g.x, g.y}] = v;
        }
        return out;
    };
    auto pts = [](std::initializer_list<std::pair<long, long>> list) {
        Table out;
        for (auto [x, y] : list) out[{Rational(x), Rational(y)}] = 1;
        return out;
    };
    struct Case {
        FIRep rep;
        Table xi0, xi1, xi2;
    };
    const std::vector<Case> cases{
        {module_m(), pts({{1, 0}, {0, 1}, {1, 1}}), pts({{1, 1}}), {}},
        {module_n(), pts({{1, 0}, {0, 1}}), {}, {}},
        {module_point(), pts({{0, 0}}), pts({{1, 0}, {0, 1}}), pts({{1, 1}})},
    };
    int matched = 0;
    for (const auto& c : cases) {
        const BettiTable b = betti_numbers(discretize(sort_colex(c.rep)));
        if (plane(b, b.xi0) == c.xi0 && plane(b, b.xi1) == c.xi1 && plane(b, b.xi2) == c.xi2) ++matched;
    }
    const double secs = seconds_since(t0);
    report(matched == 3 && secs < 1.0, "betti-examples",
           std::to_string(matched) + "/3 tables exact in " + fmt(secs, 4) + " s");
}

void query_oracle(const std::vector<FIRep>& suite) {
    const auto t0 = Clock::now();
    std::mt19937 rng(77);
    long lines = 0, mismatches = 0;
    for (const auto& rep : suite) {
        const auto aug = compute_augmented_arrangement(rep);
        for (const auto& line : sample_lines(rng, aug, 25)) {
            ++lines;
            if (query_barcode(aug, line) != slice_oracle(rep, line)) ++mismatches;
        }
    }
    const double secs = seconds_since(t0);
    report(mismatches == 0 && suite.size() >= 100 && lines >= 25L * static_cast<long>(suite.size()) && secs < 300,
           "query-oracle",
           std::to_string(suite.size()) + " modules, " + std::to_string(lines) + " lines, " +
               std::to_string(mismatches) + " mismatches, " + fmt(secs) + " s");
}

void ru_invariants(const std::vector<FIRep>& suite) {
    long walks = 0, violations = 0, cell_checks = 0, vine_checks = 0;
    std::string first;
    for (const auto& rep : suite)
        for (auto mode : {StrategyMode::Auto, StrategyMode::AllB, StrategyMode::AllC}) {
            BuildOptions opts;
            opts.mode = mode;
            opts.check = true;
            opts.calibration_updates = 50;
            BuildStats stats;
            ++walks;
            try {
                compute_augmented_arrangement(rep, opts, &stats);
            } catch (const std::exception& e) {
                if (first.empty()) first = e.what();
                ++violations;
            }
            cell_checks += stats.checks;
            vine_checks += stats.transition_checks;
        }
    report(violations == 0 && vine_checks > 0, "ru-invariants",
           std::to_string(walks) + " instrumented walks, " + std::to_string(cell_checks) + " cell checks, " +
               std::to_string(vine_checks) + " per-transposition checks, " + std::to_string(violations) +
               " violations" + (first.empty() ? "" : " (" + first + ")"));
}

void hilbert_identity(const std::vector<FIRep>& suite) {
    long points = 0, bad = 0;
    for (const auto& raw : suite) {
        const FIRep rep = sort_colex(raw);
        const GridFIRep grid = discretize(rep);
        const BettiTable b = betti_numbers(grid);
        for (int x = 0; x < grid.grid.nx(); ++x)
            for (int y = 0; y < grid.grid.ny(); ++y) {
                int sum = 0;
                auto add = [&](const std::map<GridPoint, int>& xi, int sign) {
                    for (const auto& [p, v] : xi)
                        if (p.x <= x && p.y <= y) sum += sign * v;
                };
                add(b.xi0, 1);
                add(b.xi1, -1);
                add(b.xi2, 1);
                ++points;
                if (sum != dim_at(rep, grid.grid.at({x, y}))) ++bad;
            }
    }
    report(bad == 0, "hilbert-identity",
           std::to_string(points) + " grid points, " + std::to_string(bad) + " violations");
}

void structural_bounds(const std::vector<FIRep>& suite) {
    long bad_anchor = 0, bad_faces = 0, bad_template = 0, bad_transp = 0, bad_path = 0;
    double worst_transp = 0, worst_path = 0;
    for (const auto& rep : suite)
        for (auto mode : {StrategyMode::Auto, StrategyMode::AllC}) {
            BuildOptions opts;
            opts.mode = mode;
            opts.calibration_updates = 50;
            BuildStats stats;
            const auto aug = compute_augmented_arrangement(rep, opts, &stats);
            const long k = aug.kappa();
            if (static_cast<long>(aug.anchors.size()) > k) ++bad_anchor;
            if (static_cast<long>(aug.dcel.faces().size()) > std::max(1L, k * k)) ++bad_faces;
            for (const auto& tpl : aug.templates) {
                long size = 0;
                for (const auto& bar : tpl) size += bar.multiplicity;
                if (size > stats.m1) ++bad_template;
            }
            const long limit = 2L * (long(stats.m1) * stats.m1 + long(stats.m2) * stats.m2) * std::max(1L, k);
            if (stats.transpositions > limit) ++bad_transp;
            if (limit > 0) worst_transp = std::max(worst_transp, double(stats.transpositions) / double(limit));
            if (stats.path_weight > 2 * stats.mst_weight) ++bad_path;
            if (stats.mst_weight > 0)
                worst_path = std::max(worst_path, Rational(stats.path_weight / stats.mst_weight).get_d());
        }
    const long bad = bad_anchor + bad_faces + bad_template + bad_transp + bad_path;
    report(bad == 0, "structural-bounds",
           "violations anchors/faces/templates/transpositions/path = " + std::to_string(bad_anchor) + "/" +
               std::to_string(bad_faces) + "/" + std::to_string(bad_template) + "/" + std::to_string(bad_transp) +
               "/" + std::to_string(bad_path) + "; max transpositions/limit " + fmt(worst_transp, 3) +
               ", max path/MST " + fmt(worst_path, 3));
}

// Order of the lifts of a and b in a cell: -1, 0 (same lift) or +1.
int lift_order(const TemplateInput& in, const std::vector<int>& chain, GridPoint a, GridPoint b) {
    auto rank = [&](GridPoint p) {
        const int e = lift_to_chain(in, chain, p);
        return std::find(chain.begin(), chain.end(), e) - chain.begin();
    };
    const auto ra = rank(a), rb = rank(b);
    return ra < rb ? -1 : ra > rb ? 1 : 0;
}

void switch_separation() {
    std::mt19937 rng(5);
    long pairs = 0, bad = 0, max_switch = 0, max_sep = 0, attempts = 0;
    while (pairs < 1000 && attempts < 100000) {
        ++attempts;
        const FIRep rep = random_firep(rng, attempts % 2, 7, 5);
        const GridFIRep grid = discretize(sort_colex(rep));
        const TemplateInput in = prepare_templates(grid, betti_numbers(grid));
        if (in.dcel.lines().empty() || in.support.size() < 2) continue;
        const DualGraph graph = dual_graph(in.dcel);
        std::vector<std::vector<int>> chains;
        for (std::size_t f = 0; f < in.dcel.faces().size(); ++f) chains.push_back(cell_chain(in, static_cast<int>(f)));
        GridPoint lo = in.support.front(), hi = in.support.front();
        for (const auto& s : in.support) {
            lo = {std::min(lo.x, s.x), std::min(lo.y, s.y)};
            hi = {std::max(hi.x, s.x), std::max(hi.y, s.y)};
        }
        if (hi.x == lo.x || hi.y == lo.y) continue;
        std::uniform_int_distribution<int> dx(lo.x, hi.x), dy(lo.y, hi.y);
        for (int k = 0; k < 20 && pairs < 1000; ++k) {
            GridPoint a{dx(rng), dy(rng)}, b{dx(rng), dy(rng)};
            if (!(a.x < b.x && a.y > b.y) && !(b.x < a.x && b.y > a.y)) continue;
            ++pairs;
            std::set<int> switching, separating;
            for (const auto& e : graph.edges) {
                const int before = lift_order(in, chains[static_cast<std::size_t>(e.lower)], a, b);
                const int after = lift_order(in, chains[static_cast<std::size_t>(e.upper)], a, b);
                if (before * after < 0) switching.insert(e.anchor);
                if ((before == 0) != (after == 0)) separating.insert(e.anchor);
            }
            bool ok = switching.size() <= 1 && separating.size() <= 2;
            for (int s : switching) ok = ok && !separating.count(s);
            if (!ok) ++bad;
            max_switch = std::max(max_switch, static_cast<long>(switching.size()));
            max_sep = std::max(max_sep, static_cast<long>(separating.size()));
        }
    }
    report(bad == 0 && pairs >= 1000, "switch-separation",
           std::to_string(pairs) + " incomparable pairs, max switching lines " + std::to_string(max_switch) +
               ", max separating lines " + std::to_string(max_sep) + ", " + std::to_string(bad) + " violations");
}

double brute_plan(const std::vector<StepCosts>& costs, bool ru_valid) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = costs.size();
    std::function<void(std::size_t, int, double)> rec = [&](std::size_t i, int prev, double acc) {
        if (i == n) {
            best = std::min(best, acc);
            return;
        }
        for (int o = 0; o < 3; ++o) {
            if (o == 2 && prev == 0) continue;
            rec(i + 1, o, acc + (o == 0 ? costs[i].a : o == 1 ? costs[i].b : costs[i].c));
        }
    };
    rec(0, ru_valid ? 1 : 0, 0.0);
    return best;
}

void strategy_dp() {
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_real_distribution<double> cost(0.0, 20.0);
    int bad = 0, invalid = 0;
    for (int t = 0; t < 500; ++t) {
        std::vector<StepCosts> costs(static_cast<std::size_t>(len(rng)));
        for (auto& c : costs) c = {cost(rng), cost(rng), cost(rng)};
        const bool ru_valid = t % 4 == 3;
        const Strategy s = plan_strategy(costs, ru_valid);
        double total = 0;
        for (std::size_t i = 0; i < costs.size(); ++i) {
            const Option o = s.choice[i];
            total += o == Option::A ? costs[i].a : o == Option::B ? costs[i].b : costs[i].c;
            const bool prev_a = i == 0 ? !ru_valid : s.choice[i - 1] == Option::A;
            if (o == Option::C && prev_a) ++invalid;
        }
        const double expect = brute_plan(costs, ru_valid);
        if (std::abs(s.total - expect) > 1e-9 || std::abs(total - expect) > 1e-9) ++bad;
    }
    report(bad == 0 && invalid == 0, "strategy-dp",
           "500 chains, " + std::to_string(bad) + " suboptimal, " + std::to_string(invalid) + " infeasible");
}

// Noisy circle: 90 points in an annulus, 10 in a square.
void noisy_circle() {
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> angle(0, 2 * M_PI), radius(0.8, 1.0), square(-1.0, 1.0);
    std::vector<std::pair<double, double>> raw;
    for (int i = 0; i < 90; ++i) {
        const double a = angle(rng), r = radius(rng);
        raw.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    for (int i = 0; i < 10; ++i) raw.emplace_back(square(rng), square(rng));
    auto milli = [](double v) { return q(std::lround(v * 1000), 1000); };
    std::vector<Point2> pts;
    std::vector<Rational> codensity;
    for (const auto& p : raw) pts.push_back({milli(p.first), milli(p.second)});
    // Codensity: distance to the third nearest neighbour.
    for (const auto& p : raw) {
        std::vector<double> d;
        for (const auto& r : raw) d.push_back(std::hypot(p.first - r.first, p.second - r.second));
        std::sort(d.begin(), d.end());
        codensity.push_back(milli(d[3]));
    }
    const Bifiltration bif = rips_bifiltration(pts, codensity, q(4, 5), 2);
    const FIRep rep = coarsen_uniform(firep_from_bifiltration(bif, 1), 5, 5);

    const auto t0 = Clock::now();
    BuildStats stats;
    const auto aug = compute_augmented_arrangement(rep, {}, &stats);
    const double secs = seconds_since(t0);

    std::mt19937 lrng(3);
    int agree = 0;
    const auto lines = sample_lines(lrng, aug, 5);
    for (const auto& line : lines) agree += query_barcode(aug, line) == slice_oracle(rep, line);

    // Diagonal of the grade box.
    const Rational slope = (aug.upper.y - aug.lower.y) / (aug.upper.x - aug.lower.x);
    const LineSpec diag = LineSpec::finite(slope, aug.lower.y - slope * aug.lower.x);
    std::vector<double> lengths;
    for (const auto& bar : query_barcode(aug, diag)) {
        const Bigrade end = bar.death ? *bar.death : *push(diag, aug.upper);
        const double len = std::hypot(Rational(end.x - bar.birth.x).get_d(), Rational(end.y - bar.birth.y).get_d());
        for (int k = 0; k < bar.multiplicity; ++k) lengths.push_back(len);
    }
    std::sort(lengths.begin(), lengths.end());
    double ratio = 0;
    if (!lengths.empty()) {
        const std::size_t n = lengths.size();
        const double median = n % 2 ? lengths[n / 2] : (lengths[n / 2 - 1] + lengths[n / 2]) / 2;
        ratio = lengths.back() / median;
    }
    const bool ok = secs < 120 && agree == static_cast<int>(lines.size()) && lines.size() >= 5 && ratio >= 3;
    report(ok, "noisy-circle",
           std::to_string(bif.simplices.size()) + " simplices, m1=" + std::to_string(stats.m1) +
               " m2=" + std::to_string(stats.m2) + ", compute " + fmt(secs) + " s, " + std::to_string(agree) + "/" +
               std::to_string(lines.size()) + " lines match the oracle, diagonal has " +
               std::to_string(lengths.size()) + " intervals, longest/median = " + fmt(ratio));
}

void serialization(const std::vector<FIRep>& suite) {
    std::mt19937 rng(12);
    long queries = 0, bad = 0;
    for (const auto& rep : suite) {
        const auto aug = compute_augmented_arrangement(rep);
        const std::string text = save_augmented(aug);
        const auto back = load_augmented(text);
        if (save_augmented(back) != text) ++bad;
        for (const auto& line : sample_lines(rng, aug, 10)) {
            ++queries;
            if (query_json(back, line, false).dump() != query_json(aug, line, false).dump()) ++bad;
        }
    }
    report(bad == 0, "serialization",
           std::to_string(suite.size()) + " modules, " + std::to_string(queries) + " queries, " +
               std::to_string(bad) + " differences");
}

}  // namespace

int main() {
    const auto suite = random_suite(100, 20240);
    betti_examples();
    query_oracle(suite);
    ru_invariants(suite);
    hilbert_identity(suite);
    structural_bounds(suite);
    switch_separation();
    strategy_dp();
    noisy_circle();
    serialization(std::vector<FIRep>(suite.begin(), suite.begin() + 30));
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
