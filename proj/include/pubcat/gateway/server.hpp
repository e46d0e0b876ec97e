#pragma once

#include <memory>
#include <optional>
#include <string>

#include "pubcat/gateway/service.hpp"

namespace pubcat {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::string> static_dir;  // mounted at "/"
};

/// HTTP front end: every /api route goes through `dispatch`.
class Server {
 public:
  Server(Service& service, ServerOptions options);
  ~Server();

  /// Binds the socket; returns the bound port. Throws StorageUnavailable
  /// if the address cannot be bound.
  int bind();
  /// Serves until stop(); call after bind().
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Splits "host:port" (or ":port", or "port").
ServerOptions parse_listen_address(const std::string& text);

}  // namespace pubcat
