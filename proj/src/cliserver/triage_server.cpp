#include "hallucheck/error.hpp"
#include "hallucheck/triage.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>

namespace hallucheck {

struct TriageServer::Impl {
    TriageService& service;
    httplib::Server server;
    std::string ui_dir;

    Impl(TriageService& s, std::string ui) : service(s), ui_dir(std::move(ui)) {}

    static void send(httplib::Response& res, const ApiResponse& r)
    {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    }

    void install()
    {
        // SO_REUSEPORT would let a second server share the port silently.
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        });
        server.Get("/api/queue", [this](const httplib::Request&, httplib::Response& res) { send(res, service.queue()); });
        server.Get("/api/progress",
                   [this](const httplib::Request&, httplib::Response& res) { send(res, service.progress()); });
        server.Get(R"(/api/papers/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.paper(httplib::detail::decode_url(req.matches[1], false)));
        });
        server.Get(R"(/api/search-links/([^/]+)/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.links(httplib::detail::decode_url(req.matches[1], false), req.matches[2]));
        });
        server.Post("/api/verdicts", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.post_verdict(req.body));
        });
        server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
            res.set_header(kSchemaHeader, "1");
        });
        server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (req.path.starts_with("/api/") && res.body.empty()) {
                res.set_content(R"({"error":"not_found","reason":"unknown_route","message":"no such endpoint"})",
                                "application/json");
            }
        });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            spdlog::error("request failed: {}", what);
            res.status = 500;
            res.set_content(R"({"error":"internal","reason":"exception","message":"internal error"})",
                            "application/json");
        });
        if (!ui_dir.empty() && !server.set_mount_point("/", ui_dir)) {
            throw Error(ErrorCode::IoError, "UI directory not found: " + ui_dir);
        }
    }
};

TriageServer::TriageServer(TriageService& service, std::string ui_dir)
    : impl_(std::make_unique<Impl>(service, std::move(ui_dir)))
{
    impl_->install();
}

TriageServer::~TriageServer()
{
    stop();
}

int TriageServer::bind(const std::string& host, int port)
{
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) {
        throw Error(ErrorCode::BindError, "cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

void TriageServer::run()
{
    impl_->server.listen_after_bind();
}

void TriageServer::stop()
{
    if (impl_) {
        impl_->server.stop();
    }
}

std::pair<std::string, int> parse_bind_address(const std::string& addr)
{
    auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon + 1 == addr.size()) {
        throw Error(ErrorCode::BindError, "bind address must be host:port, got '" + addr + "'");
    }
    std::string host = addr.substr(0, colon);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
        host = host.substr(1, host.size() - 2);
    }
    if (host.empty()) {
        host = "127.0.0.1";
    }
    int port = -1;
    const char* b = addr.data() + colon + 1;
    const char* e = addr.data() + addr.size();
    auto [ptr, ec] = std::from_chars(b, e, port);
    if (ec != std::errc() || ptr != e || port < 0 || port > 65535) {
        throw Error(ErrorCode::BindError, "bad port in bind address '" + addr + "'");
    }
    return {host, port};
}

} // namespace hallucheck
