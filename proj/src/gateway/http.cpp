#include "httplib.h"
#include "t4f/error.hpp"
#include "t4f/gateway.hpp"

namespace t4f::gateway {

HttpServer::HttpServer(std::shared_ptr<const Service> service, ServerOptions options)
    : service_(std::move(service)), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
    auto& svr = *server_;
    // SO_REUSEPORT (the library default) would let two servers share a port silently.
    svr.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });

    svr.Get(R"(/api/.*)", [svc = service_](const httplib::Request& req, httplib::Response& res) {
        const auto r = svc->handle(req.path, req.params);
        res.status = r.status;
        res.set_content(r.body, "application/json; charset=utf-8");
    });

    if (options_.static_dir) {
        if (!svr.set_mount_point("/", options_.static_dir->string()))
            throw Error("static directory not found: " + options_.static_dir->string());
    }

    if (options_.cors) {
        svr.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
        });
        svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    }

    svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) res.set_content(io::canonical(Json{{"error", "not found"}}), "application/json; charset=utf-8");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
    if (port_ >= 0) return port_;
    if (options_.port == 0) {
        port_ = server_->bind_to_any_port(options_.host);
    } else {
        port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
    }
    if (port_ < 0) throw Error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    return port_;
}

void HttpServer::listen() {
    bind();
    server_->listen_after_bind();
}

int HttpServer::start() {
    const int port = bind();
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port;
}

void HttpServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace t4f::gateway
