#include "pubcat/gateway/api.hpp"

#include <charconv>
#include <regex>

#include "pubcat/gateway/serialization.hpp"

namespace pubcat {

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

ApiResponse json_response(int status, const json& body) {
  return {status, body.dump(), "application/json"};
}

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
  return json_response(status, json{{"error", {{"code", code}, {"message", message}}}});
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Malformed, std::string("request body is not valid JSON: ") + e.what());
  }
}

const std::string& required_query(const ApiRequest& req, const std::string& key) {
  auto it = req.query.find(key);
  if (it == req.query.end() || it->second.empty()) {
    throw Error(ErrorCode::Malformed, "missing query parameter '" + key + "'");
  }
  return it->second;
}

int parse_int(std::string_view text, const std::string& what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::Malformed, what + " must be an integer");
  }
  return value;
}

int round_param(const std::string& text) {
  const int round = parse_int(text, "round");
  if (round != 1 && round != 2) throw Error(ErrorCode::OutOfRange, "round must be 1 or 2");
  return round;
}

json summary_json(const PanelSummary& s) {
  json sample = json::array();
  for (const auto& e : s.sample) {
    sample.push_back(json{{"expert_id", e.expert_id}, {"field", e.field}, {"seed", e.seed}});
  }
  return json{{"id", s.id},
              {"field", s.field},
              {"state", panel_state_name(s.state)},
              {"population", s.population},
              {"params", s.params},
              {"sample_size", s.sample.size()},
              {"sample", std::move(sample)},
              {"answers", {{"1", s.answers[0]}, {"2", s.answers[1]}}},
              {"publishers", {{"domestic", s.list_sizes[0]}, {"foreign", s.list_sizes[1]}}}};
}

json questionnaire_json(const Questionnaire& q) {
  json items = json::array();
  for (std::size_t i = 0; i < q.items.size(); ++i) {
    json item = q.items[i];
    item["initial_numeric"] = q.initial_numeric[i];
    item["changed"] = q.initial_numeric[i] != q.items[i].displayed_numeric;
    items.push_back(std::move(item));
  }
  return json{{"panel_id", q.panel_id}, {"field", q.field},  {"expert_id", q.expert_id},
              {"round", q.round},       {"items", std::move(items)}};
}

json analytics_json(const std::string& panel_id, PanelState state, const AnalyticsDocument& doc) {
  return json{{"panel_id", panel_id},
              {"state", panel_state_name(state)},
              {"response_rates", doc.response_rates},
              {"equalization", doc.equalization ? json(*doc.equalization) : json(nullptr)}};
}

std::optional<SamplingParams> params_from(const json& body, const SamplingParams& defaults) {
  auto it = body.find("params");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_object()) throw Error(ErrorCode::Malformed, "'params' must be an object");
  SamplingParams p = defaults;
  p.confidence_z = it->value("confidence_z", p.confidence_z);
  p.margin_e = it->value("margin_e", p.margin_e);
  p.proportion_p = it->value("proportion_p", p.proportion_p);
  return p;
}

CreatePanelRequest create_request(const json& body, const SamplingParams& defaults) {
  if (!body.is_object()) throw Error(ErrorCode::Malformed, "body must be a JSON object");
  CreatePanelRequest r;
  r.field = body.at("field").get<std::string>();
  r.seed = body.at("seed").get<std::uint64_t>();
  r.params = params_from(body, defaults);
  if (auto it = body.find("panel_id"); it != body.end() && !it->is_null()) r.panel_id = it->get<std::string>();
  if (auto it = body.find("sample_size"); it != body.end() && !it->is_null()) r.sample_size = it->get<int>();
  return r;
}

ExtendPanelRequest extend_request(const std::string& id, const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::Malformed, "body must be a JSON object");
  ExtendPanelRequest r{id, body.at("count").get<int>(), body.at("seed").get<std::uint64_t>(), std::nullopt};
  if (auto it = body.find("supplement"); it != body.end() && !it->is_null()) {
    r.supplement = Roster{it->get<std::vector<Subject>>()};
  }
  return r;
}

ApiResponse route(Service& svc, const ApiRequest& req) {
  static const std::regex kPanel(R"(/api/panels/([A-Za-z0-9_-]+))");
  static const std::regex kPanelSub(R"(/api/panels/([A-Za-z0-9_-]+)/([a-z-]+))");
  static const std::regex kRound(R"(/api/panels/([A-Za-z0-9_-]+)/rounds/([0-9]+)/(open|close))");
  static const std::regex kToken(R"(/api/q/([A-Za-z0-9_-]+))");

  const bool get = req.method == "GET" || req.method == "HEAD";
  const bool post = req.method == "POST";
  auto method_not_allowed = [] {
    return error_response(405, "METHOD_NOT_ALLOWED", "method not allowed for this resource");
  };
  std::smatch m;

  if (req.path == "/api/rankings") {
    if (!post) return method_not_allowed();
    const auto list = svc.import_ranking(required_query(req, "field"),
                                         parse_scope(required_query(req, "scope")), req.body);
    return json_response(201, list);
  }
  if (req.path == "/api/rosters") {
    if (!post) return method_not_allowed();
    return json_response(201, json{{"imported", svc.import_roster(req.body)}});
  }
  if (req.path == "/api/panels") {
    if (get) return json_response(200, json{{"panels", svc.panel_ids()}});
    if (!post) return method_not_allowed();
    const json body = parse_body(req.body);
    try {
      return json_response(201, summary_json(svc.create_panel(create_request(body, svc.defaults()))));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Malformed, std::string("bad panel request: ") + e.what());
    }
  }
  if (req.path == "/api/response-rates") {
    if (!get) return method_not_allowed();
    return json_response(200, json{{"rows", svc.response_rate_table()}});
  }
  if (std::regex_match(req.path, m, kToken)) {
    const std::string token = m[1];
    if (get) return json_response(200, questionnaire_json(svc.questionnaire(token)));
    if (!post) return method_not_allowed();
    const auto receipt = svc.submit(token, parse_body(req.body));
    return json_response(200, json{{"panel_id", receipt.panel_id},
                                   {"expert_id", receipt.expert_id},
                                   {"round", receipt.round},
                                   {"items", receipt.items},
                                   {"submitted_at", receipt.submitted_at},
                                   {"replaced", receipt.replaced}});
  }
  if (std::regex_match(req.path, m, kRound)) {
    if (!post) return method_not_allowed();
    const std::string id = m[1];
    const int round = round_param(m[2]);
    const PanelState state = m[3] == "open" ? svc.open_round(id, round) : svc.close_round(id, round);
    return json_response(200, json{{"panel_id", id}, {"state", panel_state_name(state)}});
  }
  if (std::regex_match(req.path, m, kPanel)) {
    if (!get) return method_not_allowed();
    return json_response(200, summary_json(svc.panel(m[1])));
  }
  if (std::regex_match(req.path, m, kPanelSub)) {
    const std::string id = m[1];
    const std::string sub = m[2];
    if (sub == "finalize") {
      if (!post) return method_not_allowed();
      return json_response(200, json{{"panel_id", id}, {"finals", svc.finalize(id)}});
    }
    if (sub == "extend") {
      if (!post) return method_not_allowed();
      const json body = parse_body(req.body);
      try {
        json added = json::array();
        for (const auto& e : svc.extend_panel(extend_request(id, body))) {
          added.push_back(json{{"expert_id", e.expert_id}, {"field", e.field}, {"seed", e.seed}});
        }
        return json_response(200, json{{"panel_id", id}, {"added", std::move(added)}});
      } catch (const json::exception& e) {
        throw Error(ErrorCode::Malformed, std::string("bad extension request: ") + e.what());
      }
    }
    if (!get) return method_not_allowed();
    if (sub == "aggregates") {
      const int round = round_param(required_query(req, "round"));
      return json_response(200, json{{"panel_id", id},
                                     {"round", round},
                                     {"aggregates", aggregates_to_json(svc.aggregates(id, round))}});
    }
    if (sub == "final") {
      if (auto f = req.query.find("format"); f != req.query.end() && f->second == "csv") {
        return {200, svc.finals_csv(id), "text/csv; charset=utf-8"};
      }
      return json_response(200, json{{"panel_id", id}, {"finals", svc.finals(id)}});
    }
    if (sub == "analytics") {
      const auto doc = svc.analytics(id);
      return json_response(200, analytics_json(id, svc.panel(id).state, doc));
    }
    if (sub == "response-rates") {
      return json_response(200, json{{"panel_id", id}, {"rows", svc.response_rates(id)}});
    }
    if (sub == "nonrespondents") {
      const int round = round_param(required_query(req, "round"));
      return json_response(200, json{{"panel_id", id},
                                     {"round", round},
                                     {"experts", svc.nonrespondents(id, round)}});
    }
    if (sub == "sample") {
      return {200, svc.sample_csv(id), "text/csv; charset=utf-8"};
    }
  }
  return error_response(404, "NOT_FOUND", "no such resource: " + req.path);
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownToken:
      return 401;
    case ErrorCode::UnknownPanel:
    case ErrorCode::UnknownExpert:
    case ErrorCode::UnknownRanking:
      return 404;
    case ErrorCode::IllegalTransition:
    case ErrorCode::RoundNotOpen:
    case ErrorCode::RoundClosed:
    case ErrorCode::RoundNotClosed:
    case ErrorCode::RoundNotStarted:
    case ErrorCode::NotFinalized:
    case ErrorCode::OverlapError:
    case ErrorCode::DuplicatePanel:
      return 409;
    case ErrorCode::StorageUnavailable:
      return 503;
    case ErrorCode::CorruptRecord:
      return 500;
    default:
      return 400;
  }
}

ApiResponse dispatch(Service& service, const ApiRequest& request) {
  try {
    return route(service, request);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), error_code_name(e.code()), e.what());
  } catch (const json::exception& e) {
    return error_response(400, error_code_name(ErrorCode::Malformed), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "INTERNAL", e.what());
  }
}

}  // namespace pubcat
