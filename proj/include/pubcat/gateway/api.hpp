#pragma once

#include <map>
#include <string>

#include "pubcat/error.hpp"
#include "pubcat/gateway/service.hpp"

namespace pubcat {

struct ApiRequest {
  std::string method;  // "GET", "POST"
  std::string path;    // without query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// HTTP status for an engine or store error.
int http_status(ErrorCode code) noexcept;

/// Routes one request. Never throws; failures become
/// `{"error": {"code": "...", "message": "..."}}` with a 4xx/5xx status.
ApiResponse dispatch(Service& service, const ApiRequest& request);

}  // namespace pubcat
