#include "symdx/triage_http.hpp"

#include "symdx/error.hpp"

#include <httplib.h>

namespace symdx::triage {

namespace {

void reply(httplib::Response& res, const Response& r)
{
    res.status = r.status;
    res.set_content(r.body, "application/json");
}

} // namespace

void register_routes(httplib::Server& server, const TriageService& service)
{
    const TriageService* svc = &service;
    server.Get("/healthz", [svc](const httplib::Request&, httplib::Response& res) { reply(res, svc->healthz()); });
    server.Get("/api/v1/symptoms",
               [svc](const httplib::Request&, httplib::Response& res) { reply(res, svc->symptoms()); });
    server.Get("/api/v1/diseases",
               [svc](const httplib::Request&, httplib::Response& res) { reply(res, svc->diseases()); });
    server.Get("/api/v1/clusters",
               [svc](const httplib::Request&, httplib::Response& res) { reply(res, svc->clusters()); });
    server.Get(R"(/api/v1/similar/(.+))", [svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->similar(httplib::detail::decode_url(req.matches[1], false)));
    });
    server.Post("/api/v1/predict",
                [svc](const httplib::Request& req, httplib::Response& res) { reply(res, svc->predict(req.body)); });
    server.Post("/api/v1/suggest",
                [svc](const httplib::Request& req, httplib::Response& res) { reply(res, svc->suggest(req.body)); });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        reply(res, {500, ordered_json{{"error", message}}.dump()});
    });
}

void serve(const TriageService& service, const std::string& addr, int port)
{
    httplib::Server server;
    register_routes(server, service);
    if (!server.bind_to_port(addr, port))
        fail(ErrorCode::IoFailure, "cannot bind " + addr + ":" + std::to_string(port));
    server.listen_after_bind();
}

} // namespace symdx::triage
