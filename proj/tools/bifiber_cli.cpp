// Command-line front end: compute, query, betti, rips, serve.

#include "bifiber/errors.hpp"
#include "bifiber/query.hpp"
#include "bifiber/serialize.hpp"
#include "bifiber/server.hpp"
#include "bifiber/templates.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bifiber;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

FIRep load_module(const std::string& path, int degree, int xbins, int ybins) {
    FIRep rep = parse_module_text(read_file(path), degree);
    if ((xbins > 0 || ybins > 0) && grade_bounds(rep)) {
        const int fallback = static_cast<int>(rep.m1() + rep.m2());
        rep = coarsen_uniform(rep, xbins > 0 ? xbins : fallback, ybins > 0 ? ybins : fallback);
    }
    return rep;
}

Rational number(const std::string& text) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

bool looks_like_aug(const std::string& text) {
    auto pos = text.find_first_not_of(" \t\r\n");
    return pos != std::string::npos && text[pos] == '{';
}

std::string grade_text(const Bigrade& g, bool flip) {
    return "(" + to_short_string(flip ? Rational(-g.x) : g.x) + ", " + to_short_string(g.y) + ")";
}

Barcode flipped(Barcode bc) {
    for (auto& bar : bc) {
        bar.birth.x = -bar.birth.x;
        if (bar.death) bar.death->x = -bar.death->x;
    }
    return bc;
}

void print_betti_text(const AugmentedArrangement& aug, bool flip) {
    const char* names[3] = {"xi0", "xi1", "xi2"};
    const std::map<GridPoint, int>* tables[3] = {&aug.betti.xi0, &aug.betti.xi1, &aug.betti.xi2};
    for (int i = 0; i < 3; ++i) {
        std::cout << names[i] << ":";
        if (tables[i]->empty()) std::cout << " none";
        for (const auto& [p, v] : *tables[i]) std::cout << " " << grade_text(aug.betti.grid.at(p), flip) << "=" << v;
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fibered barcodes of 2-parameter persistence modules"};
    app.require_subcommand(1);

    std::string input, output, aug_path;
    int degree = 0, xbins = 0, ybins = 0, port = 0;
    bool json = false, normalized = false, flip = false, check = false, no_simplify = false;
    std::string slope, intercept, vertical, strategy = "auto", host = "0.0.0.0";
    std::string max_scale = "1";
    int max_dim = 2;

    auto* compute = app.add_subcommand("compute", "Build the augmented arrangement and save it");
    compute->add_option("input", input, "Bifiltration or FI-rep text")->required();
    compute->add_option("-d,--degree", degree, "Homology degree")->check(CLI::NonNegativeNumber);
    compute->add_option("--xbins", xbins, "Coarsen x onto N uniform values")->check(CLI::PositiveNumber);
    compute->add_option("--ybins", ybins, "Coarsen y onto N uniform values")->check(CLI::PositiveNumber);
    compute->add_option("-o,--output", output, "Output .aug file")->required();
    compute->add_option("--strategy", strategy, "auto, all-b or all-c")->check(CLI::IsMember({"auto", "all-b", "all-c"}));
    compute->add_flag("--check", check, "Verify invariants at every cell");
    compute->add_flag("--no-simplify", no_simplify, "Skip equal-grade cancellation");

    auto* query = app.add_subcommand("query", "Barcode of one line");
    query->add_option("aug", aug_path, ".aug file")->required();
    auto* o_slope = query->add_option("--slope", slope, "Slope (>= 0)");
    auto* o_icpt = query->add_option("--intercept", intercept, "Intercept");
    auto* o_vert = query->add_option("--vertical", vertical, "Vertical line x = P");
    o_slope->needs(o_icpt);
    o_icpt->needs(o_slope);
    o_vert->excludes(o_slope)->excludes(o_icpt);
    query->add_flag("--normalized", normalized, "Normalized diagram window");
    query->add_flag("--json", json, "JSON output");
    query->add_flag("--flip-x", flip, "Negate x on output");

    auto* betti = app.add_subcommand("betti", "Bigraded Betti numbers");
    betti->add_option("input", input, "Bifiltration or FI-rep text")->required();
    betti->add_option("-d,--degree", degree, "Homology degree")->check(CLI::NonNegativeNumber);
    betti->add_option("--xbins", xbins)->check(CLI::PositiveNumber);
    betti->add_option("--ybins", ybins)->check(CLI::PositiveNumber);
    betti->add_flag("--json", json, "JSON output");
    betti->add_flag("--flip-x", flip, "Negate x on output");

    auto* rips = app.add_subcommand("rips", "Function-Rips bifiltration of a point file (lines: x y codensity)");
    rips->add_option("input", input, "Point file")->required();
    rips->add_option("--max-scale", max_scale, "Largest distance threshold");
    rips->add_option("--max-dim", max_dim, "Largest simplex dimension")->check(CLI::NonNegativeNumber);
    rips->add_option("-o,--output", output, "Output bifiltration")->required();

    auto* serve = app.add_subcommand("serve", "HTTP API");
    serve->add_option("input", input, ".aug file or module text");
    serve->add_option("-d,--degree", degree)->check(CLI::NonNegativeNumber);
    serve->add_option("--port", port, "Port (default: PORT or 8080)");
    serve->add_option("--host", host);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*compute) {
            BuildOptions opts;
            opts.check = check;
            opts.simplify = !no_simplify;
            opts.mode = strategy == "all-b" ? StrategyMode::AllB : strategy == "all-c" ? StrategyMode::AllC : StrategyMode::Auto;
            BuildStats stats;
            const FIRep rep = load_module(input, degree, xbins, ybins);
            const AugmentedArrangement aug = compute_augmented_arrangement(rep, opts, &stats);
            write_file(output, save_augmented(aug));
            std::cerr << "m1=" << stats.m1 << " m2=" << stats.m2 << " kappa=" << aug.kappa()
                      << " anchors=" << stats.anchor_count << " cells=" << stats.face_count
                      << " transpositions=" << stats.transpositions << "\n";
            return 0;
        }
        if (*query) {
            if (!*o_vert && !*o_slope) throw InputError("give --slope and --intercept, or --vertical");
            const LineSpec line = *o_vert ? LineSpec::vertical(number(vertical))
                                          : LineSpec::finite(number(slope), number(intercept));
            line.validate();
            const AugmentedArrangement aug = load_augmented(read_file(aug_path));
            Barcode bc = query_barcode(aug, line);
            if (json) {
                Json out = query_json(aug, line, normalized);
                if (flip) out["barcode"] = barcode_json(flipped(bc));
                std::cout << out.dump(2) << "\n";
            } else {
                const PersistenceDiagram d = diagram(aug, line, bc, normalized);
                std::cout << "line: " << line.describe() << "\n";
                for (const auto& bar : bc) {
                    std::cout << "[" << grade_text(bar.birth, flip) << ", "
                              << (bar.death ? grade_text(*bar.death, flip) : std::string("inf")) << ")";
                    if (bar.multiplicity > 1) std::cout << " x" << bar.multiplicity;
                    std::cout << "\n";
                }
                std::cout << "diagram: window=" << d.in_window.size() << " inf=" << d.inf_strip.size()
                          << " <inf=" << d.lt_inf_strip.size() << " overflow=" << d.overflow_essential << "/"
                          << d.overflow_finite << "\n";
            }
            return 0;
        }
        if (*betti) {
            const FIRep rep = sort_colex(load_module(input, degree, xbins, ybins));
            AugmentedArrangement aug;
            const GridFIRep grid = discretize(rep);
            aug.betti = betti_numbers(grid, &aug.dims);
            if (auto b = grade_bounds(rep)) {
                aug.has_bounds = true;
                aug.lower = b->first;
                aug.upper = b->second;
            }
            if (json)
                std::cout << betti_json(aug).dump(2) << "\n";
            else
                print_betti_text(aug, flip);
            return 0;
        }
        if (*rips) {
            std::istringstream in(read_file(input));
            std::vector<Point2> pts;
            std::vector<Rational> gamma;
            std::string line;
            int lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
                std::istringstream ls(line);
                std::string x, y, g;
                if (!(ls >> x)) continue;
                if (!(ls >> y >> g)) throw InputError("line " + std::to_string(lineno) + ": expected 'x y codensity'");
                pts.push_back({number(x), number(y)});
                gamma.push_back(number(g));
            }
            write_file(output, write_bifiltration(rips_bifiltration(pts, gamma, number(max_scale), max_dim)));
            return 0;
        }
        if (*serve) {
            if (port == 0) {
                const char* env = std::getenv("PORT");
                port = env ? std::atoi(env) : 8080;
            }
            Service service;
            if (!input.empty()) {
                const std::string text = read_file(input);
                const std::string id = service.add(looks_like_aug(text) ? load_augmented(text)
                                                                         : compute_augmented_arrangement(parse_module_text(text, degree)));
                std::cerr << "loaded module " << id << "\n";
            }
            std::cerr << "listening on " << host << ":" << port << "\n";
            return run_server(service, host, port) == 0 ? 0 : 1;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
