#include "authorship/service/service.hpp"

// after Eigen: <resolv.h>, pulled in here, defines a macro named _res
#include <httplib.h>

namespace authorship::service {

namespace {

void send(httplib::Response& res, const HttpResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::string_view code_for(int status) {
  switch (status) {
    case 400: return "bad_request";
    case 404: return "not_found";
    case 405: return "method_not_allowed";
    case 413: return "payload_too_large";
    case 414: return "uri_too_long";
    case 503: return "models_unavailable";
    default: return status >= 500 ? "internal_error" : "http_error";
  }
}

}  // namespace

struct HttpServer::Impl {
  const Service& service;
  httplib::Server server;
  explicit Impl(const Service& s) : service(s) {}
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& svr = impl_->server;
  const auto& cfg = service.config();
  svr.set_payload_max_length(cfg.max_body_bytes);
  svr.set_default_headers({{"Access-Control-Allow-Origin", cfg.cors_origin},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Vary", "Origin"}});

  const Service* s = &service;
  svr.Post("/predict", [s](const httplib::Request& req, httplib::Response& res) {
    const auto full = req.get_param_value("full");
    send(res, s->predict(req.body, full == "true" || full == "1"));
  });
  svr.Post("/perturb", [s](const httplib::Request& req, httplib::Response& res) { send(res, s->perturb(req.body)); });
  svr.Get("/models", [s](const httplib::Request&, httplib::Response& res) { send(res, s->models()); });
  svr.Get("/healthz", [s](const httplib::Request&, httplib::Response& res) { send(res, s->healthz()); });
  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  // statuses raised before a handler ran (no route, body too large) get a JSON body here
  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    res.set_content(error_body(code_for(res.status), httplib::status_message(res.status)).dump(), "application/json");
    return httplib::Server::HandlerResponse::Handled;
  });
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unexpected failure";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(error_body("internal_error", what).dump(), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  const auto& cfg = impl_->service.config();
  auto& svr = impl_->server;
  if (cfg.port == 0) {
    const int port = svr.bind_to_any_port(cfg.host);
    if (port <= 0) throw IoError("cannot bind " + cfg.host);
    return port;
  }
  if (!svr.bind_to_port(cfg.host, cfg.port))
    throw IoError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  return cfg.port;
}

void HttpServer::listen() {
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace authorship::service
