// HTTP query service over a store of augmented arrangements.

#pragma once

#include "bifiber/templates.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace bifiber {

struct HttpResponse {
    int status = 200;
    std::string body;  // JSON
};

class Service {
public:
    explicit Service(long column_limit = 2'000'000) : column_limit_(column_limit) {}

    /// Publishes an arrangement and returns its id.
    std::string add(AugmentedArrangement aug);
    std::shared_ptr<const AugmentedArrangement> find(const std::string& id) const;

    /// Routes one request. `params` holds the decoded query string.
    HttpResponse handle(const std::string& method, const std::string& path,
                        const std::multimap<std::string, std::string>& params, const std::string& body);

    /// Registers the routes on an httplib server.
    void mount(httplib::Server& server);

private:
    HttpResponse post_module(const std::multimap<std::string, std::string>& params, const std::string& body);
    HttpResponse get_barcode(const AugmentedArrangement& aug, const std::multimap<std::string, std::string>& params);

    long column_limit_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const AugmentedArrangement>> store_;
    std::atomic<long> next_id_{1};
};

/// Blocks serving on host:port.
int run_server(Service& service, const std::string& host, int port);

}  // namespace bifiber
