#include "bifiber/server.hpp"

#include "bifiber/errors.hpp"
#include "bifiber/serialize.hpp"

#include "httplib.h"

#include <mutex>
#include <regex>

namespace bifiber {

namespace {

HttpResponse json_response(int status, const Json& body) { return {status, body.dump()}; }

HttpResponse error_response(int status, const std::string& message) {
    return json_response(status, Json{{"error", message}});
}

std::optional<std::string> param(const std::multimap<std::string, std::string>& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
}

int int_param(const std::multimap<std::string, std::string>& params, const std::string& key, int fallback) {
    auto v = param(params, key);
    if (!v) return fallback;
    std::size_t used = 0;
    int out = 0;
    try {
        out = std::stoi(*v, &used);
    } catch (const std::exception&) {
        throw InputError("parameter '" + key + "' must be an integer");
    }
    if (used != v->size()) throw InputError("parameter '" + key + "' must be an integer");
    return out;
}

}  // namespace

std::string Service::add(AugmentedArrangement aug) {
    auto ptr = std::make_shared<const AugmentedArrangement>(std::move(aug));
    const std::string id = "m" + std::to_string(next_id_++);
    std::unique_lock lock(mutex_);
    store_.emplace(id, std::move(ptr));
    return id;
}

std::shared_ptr<const AugmentedArrangement> Service::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = store_.find(id);
    return it == store_.end() ? nullptr : it->second;
}

HttpResponse Service::post_module(const std::multimap<std::string, std::string>& params, const std::string& body) {
    FIRep rep;
    try {
        const int degree = int_param(params, "degree", 0);
        if (degree < 0) throw InputError("parameter 'degree' must be non-negative");
        const int xbins = int_param(params, "xbins", 0);
        const int ybins = int_param(params, "ybins", 0);
        if (xbins < 0 || ybins < 0) throw InputError("bin counts must be non-negative");
        rep = parse_module_text(body, degree);
        if (xbins > 0 || ybins > 0) {
            auto b = grade_bounds(rep);
            if (b) {
                const int nx = xbins > 0 ? xbins : static_cast<int>(rep.m1() + rep.m2());
                const int ny = ybins > 0 ? ybins : static_cast<int>(rep.m1() + rep.m2());
                rep = coarsen_uniform(rep, nx, ny);
            }
        }
    } catch (const InputError& e) {
        return error_response(422, e.what());
    }
    const long columns = static_cast<long>(rep.m0) + rep.m1() + rep.m2();
    if (columns > column_limit_)
        return error_response(413, "input has " + std::to_string(columns) + " columns, limit is " +
                                       std::to_string(column_limit_));
    AugmentedArrangement aug = compute_augmented_arrangement(rep);
    Json out{{"id", nullptr},
             {"bounds", bounds_json(aug)},
             {"kappa", aug.kappa()},
             {"cell_count", aug.dcel.faces().size()}};
    out["id"] = add(std::move(aug));
    return json_response(201, out);
}

HttpResponse Service::get_barcode(const AugmentedArrangement& aug, const std::multimap<std::string, std::string>& params) {
    LineSpec line;
    bool normalized = false;
    try {
        const std::string kind = param(params, "kind").value_or("finite");
        auto required = [&](const char* key) {
            auto v = param(params, key);
            if (!v) throw InputError(std::string("missing parameter '") + key + "'");
            return parse_rational(*v);
        };
        if (kind == "finite")
            line = LineSpec::finite(required("slope"), required("intercept"));
        else if (kind == "vertical")
            line = LineSpec::vertical(required("x"));
        else
            throw InputError("parameter 'kind' must be 'finite' or 'vertical'");
        line.validate();
        const std::string norm = param(params, "normalized").value_or("false");
        if (norm != "true" && norm != "false") throw InputError("parameter 'normalized' must be true or false");
        normalized = norm == "true";
    } catch (const InputError& e) {
        return error_response(400, e.what());
    } catch (const std::invalid_argument& e) {
        return error_response(400, e.what());
    }
    return json_response(200, query_json(aug, line, normalized));
}

HttpResponse Service::handle(const std::string& method, const std::string& path,
                             const std::multimap<std::string, std::string>& params, const std::string& body) {
    static const std::regex module_route(R"(^/modules/([A-Za-z0-9_-]+)/(betti|barcode|arrangement)$)");
    try {
        if (path == "/modules") {
            if (method != "POST") return error_response(405, "method not allowed");
            return post_module(params, body);
        }
        std::smatch m;
        if (!std::regex_match(path, m, module_route)) return error_response(404, "no such route");
        if (method != "GET") return error_response(405, "method not allowed");
        auto aug = find(m[1].str());
        if (!aug) return error_response(404, "unknown module id '" + m[1].str() + "'");
        const std::string what = m[2].str();
        if (what == "betti") return json_response(200, betti_json(*aug));
        if (what == "arrangement") return json_response(200, arrangement_json(*aug));
        return get_barcode(*aug, params);
    } catch (const InputError& e) {
        return error_response(422, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

void Service::mount(httplib::Server& server) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
        HttpResponse r = handle(req.method, req.path, params, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    server.Post(R"(/modules)", forward);
    server.Get(R"(/modules/.*)", forward);
}

int run_server(Service& service, const std::string& host, int port) {
    httplib::Server server;
    service.mount(server);
    return server.listen(host, port) ? 0 : 1;
}

}  // namespace bifiber
