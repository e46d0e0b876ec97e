#include "pubcat/gateway/server.hpp"

#include <charconv>

#include "httplib.h"
#include "pubcat/error.hpp"
#include "pubcat/gateway/api.hpp"

namespace pubcat {

struct Server::Impl {
  Impl(Service& s, ServerOptions o) : service(s), options(std::move(o)) {}

  Service& service;
  ServerOptions options;
  httplib::Server http;
};

namespace {

void handle(Service& service, const httplib::Request& req, httplib::Response& res) {
  ApiRequest api{req.method, req.path, {}, req.body};
  for (const auto& [key, value] : req.params) api.query.emplace(key, value);
  const ApiResponse out = dispatch(service, api);
  res.status = out.status;
  res.set_content(out.body, out.content_type);
}

}  // namespace

Server::Server(Service& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto h = [this](const httplib::Request& req, httplib::Response& res) {
    handle(impl_->service, req, res);
  };
  impl_->http.Get(R"(/api/.*)", h);
  impl_->http.Post(R"(/api/.*)", h);
  if (impl_->options.static_dir && !impl_->http.set_mount_point("/", *impl_->options.static_dir)) {
    throw Error(ErrorCode::StorageUnavailable, "cannot serve static files from '" +
                                                   *impl_->options.static_dir + "'");
  }
}

Server::~Server() { stop(); }

int Server::bind() {
  int port = impl_->options.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(impl_->options.host);
    if (port < 0) port = -1;
  } else if (!impl_->http.bind_to_port(impl_->options.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::StorageUnavailable,
                "cannot listen on " + impl_->options.host + ":" + std::to_string(impl_->options.port));
  }
  return port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

ServerOptions parse_listen_address(const std::string& text) {
  ServerOptions options;
  std::string_view port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) options.host = text.substr(0, colon);
    port_text = std::string_view(text).substr(colon + 1);
  }
  int port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidParams, "bad listen address '" + text + "'");
  }
  options.port = port;
  return options;
}

}  // namespace pubcat
