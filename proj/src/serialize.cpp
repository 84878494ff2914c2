#include "bifiber/serialize.hpp"

#include "bifiber/errors.hpp"

#include <cmath>
#include <functional>

namespace bifiber {

Json rational_json(const Rational& r) { return to_fraction_string(r); }

Json bigrade_json(const Bigrade& g) { return Json::array({rational_json(g.x), rational_json(g.y)}); }

namespace {

Rational rational_from(const Json& j) {
    if (!j.is_string()) throw std::invalid_argument("expected a rational string");
    return parse_rational(j.get<std::string>());
}

Bigrade bigrade_from(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a grade pair");
    return {rational_from(j[0]), rational_from(j[1])};
}

Json rationals_json(const std::vector<Rational>& v) {
    Json out = Json::array();
    for (const auto& r : v) out.push_back(rational_json(r));
    return out;
}

std::vector<Rational> rationals_from(const Json& j) {
    std::vector<Rational> out;
    for (const auto& e : j) out.push_back(rational_from(e));
    return out;
}

Json xi_indices_json(const std::map<GridPoint, int>& xi) {
    Json out = Json::array();
    for (const auto& [p, v] : xi) out.push_back({p.x, p.y, v});
    return out;
}

std::map<GridPoint, int> xi_indices_from(const Json& j, const Grid2& grid) {
    std::map<GridPoint, int> out;
    for (const auto& e : j) {
        GridPoint p{e.at(0).get<int>(), e.at(1).get<int>()};
        if (p.x < 0 || p.y < 0 || p.x >= grid.nx() || p.y >= grid.ny()) throw std::invalid_argument("grid index out of range");
        out[p] = e.at(2).get<int>();
    }
    return out;
}

const char* kind_name(Dcel::EdgeKind k) {
    switch (k) {
        case Dcel::EdgeKind::Line: return "line";
        case Dcel::EdgeKind::Left: return "left";
        case Dcel::EdgeKind::Right: return "right";
        case Dcel::EdgeKind::Top: return "top";
        case Dcel::EdgeKind::Bottom: return "bottom";
    }
    return "line";
}

Dcel::EdgeKind kind_from(const std::string& s) {
    if (s == "line") return Dcel::EdgeKind::Line;
    if (s == "left") return Dcel::EdgeKind::Left;
    if (s == "right") return Dcel::EdgeKind::Right;
    if (s == "top") return Dcel::EdgeKind::Top;
    if (s == "bottom") return Dcel::EdgeKind::Bottom;
    throw std::invalid_argument("unknown edge kind '" + s + "'");
}

Json template_json(const BarcodeTemplate& t) {
    Json out = Json::array();
    for (const auto& bar : t)
        out.push_back({bigrade_json(bar.birth), bar.death ? bigrade_json(*bar.death) : Json(nullptr), bar.multiplicity});
    return out;
}

BarcodeTemplate template_from(const Json& j) {
    BarcodeTemplate t;
    for (const auto& e : j) {
        TemplateBar bar;
        bar.birth = bigrade_from(e.at(0));
        if (!e.at(1).is_null()) bar.death = bigrade_from(e.at(1));
        bar.multiplicity = e.at(2).get<int>();
        if (bar.multiplicity < 1) throw std::invalid_argument("non-positive multiplicity");
        t.push_back(std::move(bar));
    }
    return t;
}

// Runs `fn`, converting any failure into a named corrupt-section error.
void section(const Json& doc, const char* name, const std::function<void(const Json&)>& fn) {
    if (!doc.contains(name)) throw InputError(std::string("corrupt section '") + name + "': missing");
    try {
        fn(doc.at(name));
    } catch (const InputError& e) {
        throw InputError(std::string("corrupt section '") + name + "': " + e.what());
    } catch (const std::exception& e) {
        throw InputError(std::string("corrupt section '") + name + "': " + e.what());
    }
}

}  // namespace

std::string save_augmented(const AugmentedArrangement& aug) {
    Json doc;
    doc["format"] = "bifiber-augmented-arrangement";
    doc["version"] = kAugFormatVersion;
    doc["bounds"] = aug.has_bounds ? Json{{"lower", bigrade_json(aug.lower)}, {"upper", bigrade_json(aug.upper)}}
                                   : Json(nullptr);
    doc["sizes"] = {{"m1", aug.m1}, {"m2", aug.m2}, {"kappa_x", aug.kappa_x}, {"kappa_y", aug.kappa_y},
                    {"shift", rational_json(aug.shift)}};
    doc["betti"] = {{"xs", rationals_json(aug.betti.grid.xs)},
                    {"ys", rationals_json(aug.betti.grid.ys)},
                    {"xi0", xi_indices_json(aug.betti.xi0)},
                    {"xi1", xi_indices_json(aug.betti.xi1)},
                    {"xi2", xi_indices_json(aug.betti.xi2)}};
    doc["dims"] = {{"xs", rationals_json(aug.dims.grid.xs)}, {"ys", rationals_json(aug.dims.grid.ys)}, {"values", aug.dims.dims}};
    Json support = Json::array(), anchors = Json::array();
    for (const auto& s : aug.support) support.push_back(bigrade_json(s));
    for (const auto& a : aug.anchors) anchors.push_back(bigrade_json(a));
    doc["support"] = support;
    doc["anchors"] = anchors;

    const auto& d = aug.dcel;
    Json lines = Json::array(), vertices = Json::array(), half_edges = Json::array(), faces = Json::array();
    for (const auto& l : d.lines()) lines.push_back({rational_json(l.slope), rational_json(l.offset)});
    for (const auto& v : d.vertices()) vertices.push_back({rational_json(v.x), rational_json(v.y), v.incident});
    for (const auto& h : d.half_edges())
        half_edges.push_back({h.origin, h.twin, h.next, h.prev, h.face, h.anchor, kind_name(h.kind)});
    for (const auto& f : d.faces()) faces.push_back(f.boundary);
    doc["dcel"] = {{"lines", lines},
                   {"vertices", vertices},
                   {"half_edges", half_edges},
                   {"faces", faces},
                   {"xmax", rational_json(d.xmax())},
                   {"ymin", rational_json(d.ymin())},
                   {"ymax", rational_json(d.ymax())},
                   {"top_face", d.top_face()},
                   {"bottom_face", d.bottom_face()}};
    Json templates = Json::array();
    for (const auto& t : aug.templates) templates.push_back(template_json(t));
    doc["templates"] = templates;
    return doc.dump() + "\n";
}

AugmentedArrangement load_augmented(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const std::exception& e) {
        throw InputError(std::string("corrupt section 'document': ") + e.what());
    }
    if (!doc.is_object()) throw InputError("corrupt section 'document': not a JSON object");
    AugmentedArrangement aug;
    int version = 0;
    section(doc, "version", [&](const Json& v) { version = v.get<int>(); });
    if (version != kAugFormatVersion)
        throw InputError("unsupported format version " + std::to_string(version) + " (expected " +
                         std::to_string(kAugFormatVersion) + ")");
    section(doc, "bounds", [&](const Json& b) {
        if (b.is_null()) return;
        aug.has_bounds = true;
        aug.lower = bigrade_from(b.at("lower"));
        aug.upper = bigrade_from(b.at("upper"));
    });
    section(doc, "sizes", [&](const Json& s) {
        aug.m1 = s.at("m1").get<Index>();
        aug.m2 = s.at("m2").get<Index>();
        aug.kappa_x = s.at("kappa_x").get<int>();
        aug.kappa_y = s.at("kappa_y").get<int>();
        aug.shift = rational_from(s.at("shift"));
    });
    section(doc, "betti", [&](const Json& b) {
        aug.betti.grid = {rationals_from(b.at("xs")), rationals_from(b.at("ys"))};
        aug.betti.xi0 = xi_indices_from(b.at("xi0"), aug.betti.grid);
        aug.betti.xi1 = xi_indices_from(b.at("xi1"), aug.betti.grid);
        aug.betti.xi2 = xi_indices_from(b.at("xi2"), aug.betti.grid);
    });
    section(doc, "dims", [&](const Json& d) {
        aug.dims.grid = {rationals_from(d.at("xs")), rationals_from(d.at("ys"))};
        aug.dims.dims = d.at("values").get<std::vector<int>>();
        if (aug.dims.dims.size() != static_cast<std::size_t>(aug.dims.grid.nx() * aug.dims.grid.ny()))
            throw std::invalid_argument("dimension grid size mismatch");
    });
    section(doc, "support", [&](const Json& s) {
        for (const auto& e : s) aug.support.push_back(bigrade_from(e));
    });
    section(doc, "anchors", [&](const Json& s) {
        for (const auto& e : s) aug.anchors.push_back(bigrade_from(e));
    });
    section(doc, "dcel", [&](const Json& d) {
        Dcel::Raw raw;
        for (const auto& l : d.at("lines")) raw.lines.push_back({rational_from(l.at(0)), rational_from(l.at(1))});
        for (const auto& v : d.at("vertices"))
            raw.vertices.push_back({rational_from(v.at(0)), rational_from(v.at(1)), v.at(2).get<int>()});
        for (const auto& h : d.at("half_edges")) {
            Dcel::HalfEdge e;
            e.origin = h.at(0).get<int>();
            e.twin = h.at(1).get<int>();
            e.next = h.at(2).get<int>();
            e.prev = h.at(3).get<int>();
            e.face = h.at(4).get<int>();
            e.anchor = h.at(5).get<int>();
            e.kind = kind_from(h.at(6).get<std::string>());
            raw.half_edges.push_back(e);
        }
        for (const auto& f : d.at("faces")) raw.faces.push_back({f.get<int>()});
        raw.xmax = rational_from(d.at("xmax"));
        raw.ymin = rational_from(d.at("ymin"));
        raw.ymax = rational_from(d.at("ymax"));
        raw.top_face = d.at("top_face").get<int>();
        raw.bottom_face = d.at("bottom_face").get<int>();
        aug.dcel = Dcel::from_raw(std::move(raw));
        aug.dcel.validate();
        if (aug.dcel.lines().size() != aug.anchors.size()) throw std::invalid_argument("line count differs from anchor count");
    });
    section(doc, "templates", [&](const Json& t) {
        for (const auto& e : t) aug.templates.push_back(template_from(e));
        if (aug.templates.size() != aug.dcel.faces().size()) throw std::invalid_argument("one template per face expected");
    });
    aug.rebuild_indices();
    return aug;
}

// ---------------------------------------------------------------------------

Json bounds_json(const AugmentedArrangement& aug) {
    if (!aug.has_bounds) return nullptr;
    return {{"lower", bigrade_json(aug.lower)}, {"upper", bigrade_json(aug.upper)}};
}

Json betti_json(const AugmentedArrangement& aug) {
    auto table = [&](const std::map<GridPoint, int>& xi) {
        Json out = Json::array();
        for (const auto& [p, v] : xi) out.push_back({{"grade", bigrade_json(aug.betti.grid.at(p))}, {"value", v}});
        return out;
    };
    Json rows = Json::array();
    for (int y = 0; y < aug.dims.grid.ny(); ++y) {
        Json row = Json::array();
        for (int x = 0; x < aug.dims.grid.nx(); ++x) row.push_back(aug.dims.at({x, y}));
        rows.push_back(row);
    }
    return {{"bounds", bounds_json(aug)},
            {"xi0", table(aug.betti.xi0)},
            {"xi1", table(aug.betti.xi1)},
            {"xi2", table(aug.betti.xi2)},
            {"dimensions", {{"xs", rationals_json(aug.dims.grid.xs)}, {"ys", rationals_json(aug.dims.grid.ys)}, {"values", rows}}}};
}

Json barcode_json(const Barcode& barcode) {
    Json out = Json::array();
    for (const auto& bar : barcode)
        out.push_back({{"birth", bigrade_json(bar.birth)},
                       {"death", bar.death ? bigrade_json(*bar.death) : Json("inf")},
                       {"multiplicity", bar.multiplicity}});
    return out;
}

namespace {

Json param_json(const ParamValue& v) {
    return {{"coef", rational_json(v.coef)}, {"radicand", rational_json(v.radicand)}, {"approx", v.approx()}};
}

Json points_json(const std::vector<DiagramPoint>& pts) {
    Json out = Json::array();
    for (const auto& p : pts)
        out.push_back({{"birth", param_json(p.birth)},
                       {"death", p.death ? param_json(*p.death) : Json("inf")},
                       {"multiplicity", p.multiplicity}});
    return out;
}

}  // namespace

Json diagram_json(const PersistenceDiagram& d) {
    return {{"bound_squared", rational_json(d.bound_sq)},
            {"bound", std::sqrt(d.bound_sq.get_d())},
            {"origin", bigrade_json(d.param.origin)},
            {"in_window", points_json(d.in_window)},
            {"inf_strip", points_json(d.inf_strip)},
            {"lt_inf_strip", points_json(d.lt_inf_strip)},
            {"overflow_essential", d.overflow_essential},
            {"overflow_finite", d.overflow_finite}};
}

Json line_json(const LineSpec& line) {
    if (line.is_vertical()) return {{"kind", "vertical"}, {"x", rational_json(line.x)}};
    return {{"kind", "finite"}, {"slope", rational_json(line.slope)}, {"intercept", rational_json(line.intercept)}};
}

Json arrangement_json(const AugmentedArrangement& aug) {
    Json anchors = Json::array();
    for (std::size_t k = 0; k < aug.anchors.size(); ++k) {
        const auto& l = aug.dcel.lines()[k];
        anchors.push_back({{"anchor", bigrade_json(aug.anchors[k])},
                           {"dual_line", {{"slope", rational_json(l.slope)}, {"offset", rational_json(l.offset)}}}});
    }
    Json cells = Json::array();
    for (std::size_t f = 0; f < aug.dcel.faces().size(); ++f) {
        Json boundary = Json::array();
        for (int h : aug.dcel.face_cycle(static_cast<int>(f))) {
            const auto& v = aug.dcel.origin(h);
            boundary.push_back({rational_json(v.x), rational_json(v.y)});
        }
        cells.push_back({{"id", f}, {"boundary", boundary}, {"template", template_json(aug.templates[f])}});
    }
    return {{"shift", rational_json(aug.shift)},
            {"box", {{"xmax", rational_json(aug.dcel.xmax())}, {"ymin", rational_json(aug.dcel.ymin())}, {"ymax", rational_json(aug.dcel.ymax())}}},
            {"top_face", aug.dcel.top_face()},
            {"bottom_face", aug.dcel.bottom_face()},
            {"anchors", anchors},
            {"cells", cells}};
}

Json query_json(const AugmentedArrangement& aug, const LineSpec& line, bool normalized) {
    const Barcode bc = query_barcode(aug, line);
    const PersistenceDiagram d = diagram(aug, line, bc, normalized);
    return {{"line", line_json(line)}, {"normalized", normalized}, {"barcode", barcode_json(bc)}, {"diagram", diagram_json(d)}};
}

}  // namespace bifiber
