#include "pubcat/gateway/serialization.hpp"

#include "pubcat/error.hpp"

namespace pubcat {

namespace {

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

std::string_view command_name(const PanelCommand& c) {
  static constexpr std::string_view kNames[] = {"open_round", "close_round", "submit_response",
                                                "add_experts", "finalize"};
  return kNames[c.index()];
}

}  // namespace

void to_json(json& j, const Field& f) { j = json{{"id", f.id}, {"name", f.name}}; }

void from_json(const json& j, Field& f) {
  j.at("id").get_to(f.id);
  j.at("name").get_to(f.name);
}

void to_json(json& j, Scope s) { j = std::string(scope_name(s)); }

void from_json(const json& j, Scope& s) { s = parse_scope(j.get<std::string>()); }

void to_json(json& j, const RankedEntry& e) {
  j = json{{"publisher", e.publisher},
           {"icee", e.icee},
           {"position", e.position},
           {"accum_share", e.accum_share},
           {"quartile", e.quartile},
           {"category_letter", std::string(1, e.category.letter)},
           {"category_numeric", e.category.numeric}};
}

void from_json(const json& j, RankedEntry& e) {
  j.at("publisher").get_to(e.publisher);
  j.at("icee").get_to(e.icee);
  j.at("position").get_to(e.position);
  j.at("accum_share").get_to(e.accum_share);
  j.at("quartile").get_to(e.quartile);
  e.category = map_quartile_to_category(e.quartile);
  if (j.at("category_numeric").get<int>() != e.category.numeric ||
      j.at("category_letter").get<std::string>() != std::string(1, e.category.letter)) {
    throw Error(ErrorCode::CorruptRecord, "category does not match quartile for " + e.publisher);
  }
}

void to_json(json& j, const RankedList& l) {
  j = json{{"field", l.field}, {"scope", l.scope}, {"entries", l.entries}, {"warnings", l.warnings}};
}

void from_json(const json& j, RankedList& l) {
  j.at("field").get_to(l.field);
  j.at("scope").get_to(l.scope);
  j.at("entries").get_to(l.entries);
  l.warnings = j.value("warnings", std::vector<std::string>{});
}

void to_json(json& j, const SamplingParams& p) {
  j = json{{"confidence_z", p.confidence_z}, {"margin_e", p.margin_e}, {"proportion_p", p.proportion_p}};
}

void from_json(const json& j, SamplingParams& p) {
  j.at("confidence_z").get_to(p.confidence_z);
  j.at("margin_e").get_to(p.margin_e);
  j.at("proportion_p").get_to(p.proportion_p);
}

void to_json(json& j, const Subject& s) {
  j = json{{"expert_id", s.expert_id}, {"field", s.field}, {"email", s.contact}};
}

void from_json(const json& j, Subject& s) {
  j.at("expert_id").get_to(s.expert_id);
  j.at("field").get_to(s.field);
  j.at("email").get_to(s.contact);
}

void to_json(json& j, const QuestionnaireItem& q) {
  j = json{{"publisher", q.publisher},
           {"scope", q.scope},
           {"displayed_numeric", q.displayed_numeric},
           {"displayed_letter", std::string(1, category_from_numeric(q.displayed_numeric).letter)}};
}

void to_json(json& j, const ResponseItem& r) {
  j = json{{"publisher", r.publisher}, {"known", r.known}, {"disagree", r.disagree}};
  if (r.scope) j["scope"] = *r.scope;
  if (r.new_score) j["new_score"] = *r.new_score;
}

void from_json(const json& j, ResponseItem& r) {
  j.at("publisher").get_to(r.publisher);
  r.scope = optional_field<Scope>(j, "scope");
  j.at("known").get_to(r.known);
  j.at("disagree").get_to(r.disagree);
  r.new_score = optional_field<int>(j, "new_score");
}

void to_json(json& j, const ExpertResponse& r) {
  j = json{{"expert_id", r.expert_id},
           {"round", r.round},
           {"items", r.items},
           {"suggested_publishers", r.suggested_publishers},
           {"submitted_at", r.submitted_at}};
}

void from_json(const json& j, ExpertResponse& r) {
  j.at("expert_id").get_to(r.expert_id);
  j.at("round").get_to(r.round);
  j.at("items").get_to(r.items);
  j.at("suggested_publishers").get_to(r.suggested_publishers);
  j.at("submitted_at").get_to(r.submitted_at);
}

void to_json(json& j, const PublisherRoundAggregate& a) {
  j = json{{"publisher", a.key.publisher},
           {"scope", a.key.scope},
           {"votes", a.votes},
           {"score_sum", a.score_sum},
           {"mean_score", a.votes > 0 ? json(a.mean_score()) : json(nullptr)}};
}

void from_json(const json& j, PublisherRoundAggregate& a) {
  j.at("publisher").get_to(a.key.publisher);
  j.at("scope").get_to(a.key.scope);
  j.at("votes").get_to(a.votes);
  j.at("score_sum").get_to(a.score_sum);
}

json aggregates_to_json(const RoundAggregates& aggregates) {
  json out = json::array();
  for (const auto& [key, agg] : aggregates) out.push_back(agg);
  return out;
}

void to_json(json& j, const FinalCategory& f) {
  j = json{{"publisher", f.publisher},
           {"scope", f.scope},
           {"initial_numeric", f.initial_numeric},
           {"round1_votes", f.round1_votes},
           {"round1_mean", f.round1_mean ? json(*f.round1_mean) : json(nullptr)},
           {"round2_votes", f.round2_votes},
           {"round2_mean", f.round2_mean ? json(*f.round2_mean) : json(nullptr)},
           {"final_numeric", f.final_numeric},
           {"final_letter", std::string(1, f.final_letter)}};
}

void from_json(const json& j, FinalCategory& f) {
  j.at("publisher").get_to(f.publisher);
  j.at("scope").get_to(f.scope);
  j.at("initial_numeric").get_to(f.initial_numeric);
  j.at("round1_votes").get_to(f.round1_votes);
  f.round1_mean = optional_field<double>(j, "round1_mean");
  j.at("round2_votes").get_to(f.round2_votes);
  f.round2_mean = optional_field<double>(j, "round2_mean");
  j.at("final_numeric").get_to(f.final_numeric);
  const auto letter = j.at("final_letter").get<std::string>();
  if (letter.size() != 1) throw Error(ErrorCode::CorruptRecord, "bad final letter");
  f.final_letter = letter.front();
}

void to_json(json& j, const PanelData& p) {
  json responses = json::object();
  json snapshots = json::array();
  for (int r = 0; r < 2; ++r) {
    json list = json::array();
    for (const auto& [expert, resp] : p.responses[r]) list.push_back(resp);
    responses[std::to_string(r + 1)] = std::move(list);
    snapshots.push_back(p.snapshots[r] ? aggregates_to_json(*p.snapshots[r]) : json(nullptr));
  }
  j = json{{"id", p.id},
           {"field", p.field},
           {"domestic", p.domestic},
           {"foreign", p.foreign},
           {"experts", p.experts},
           {"state", panel_state_name(p.state)},
           {"responses", std::move(responses)},
           {"snapshots", std::move(snapshots)},
           {"finals", p.finals}};
}

void from_json(const json& j, PanelData& p) {
  j.at("id").get_to(p.id);
  j.at("field").get_to(p.field);
  j.at("domestic").get_to(p.domestic);
  j.at("foreign").get_to(p.foreign);
  j.at("experts").get_to(p.experts);
  p.state = parse_panel_state(j.at("state").get<std::string>());
  for (int r = 0; r < 2; ++r) {
    p.responses[r].clear();
    for (const auto& item : j.at("responses").at(std::to_string(r + 1))) {
      auto resp = item.get<ExpertResponse>();
      auto id = resp.expert_id;
      p.responses[r].emplace(std::move(id), std::move(resp));
    }
    const json& snap = j.at("snapshots").at(r);
    if (snap.is_null()) {
      p.snapshots[r].reset();
    } else {
      RoundAggregates aggs;
      for (const auto& a : snap) {
        auto agg = a.get<PublisherRoundAggregate>();
        aggs.emplace(agg.key, agg);
      }
      p.snapshots[r] = std::move(aggs);
    }
  }
  j.at("finals").get_to(p.finals);
}

void to_json(json& j, const PanelCommand& c) {
  j = json{{"type", command_name(c)}};
  std::visit(
      [&](const auto& cmd) {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, OpenRound> || std::is_same_v<T, CloseRound>) {
          j["round"] = cmd.round;
        } else if constexpr (std::is_same_v<T, SubmitResponse>) {
          j["response"] = cmd.response;
        } else if constexpr (std::is_same_v<T, AddExperts>) {
          j["expert_ids"] = cmd.expert_ids;
        }
      },
      c);
}

void from_json(const json& j, PanelCommand& c) {
  const auto type = j.at("type").get<std::string>();
  if (type == "open_round") {
    c = OpenRound{j.at("round").get<int>()};
  } else if (type == "close_round") {
    c = CloseRound{j.at("round").get<int>()};
  } else if (type == "submit_response") {
    c = SubmitResponse{j.at("response").get<ExpertResponse>()};
  } else if (type == "add_experts") {
    c = AddExperts{j.at("expert_ids").get<std::vector<std::string>>()};
  } else if (type == "finalize") {
    c = FinalizePanel{};
  } else {
    throw Error(ErrorCode::CorruptRecord, "unknown command type: " + type);
  }
}

void to_json(json& j, const ResponseRateRow& r) {
  j = json{{"field", r.field.name},  {"round", r.round},
           {"sample_n", r.sample_n}, {"answers", r.answers},
           {"rate_percent", r.rate_percent}, {"provisional", r.provisional}};
}

void to_json(json& j, const ChangeStats& c) {
  j = json{{"scope", c.scope}, {"publishers", c.publishers}, {"mean", c.mean}, {"sd", c.sd}};
}

void to_json(json& j, const ConcentrationResult& c) {
  json points = json::array();
  for (const auto& p : c.lorenz) points.push_back(json::array({p.population_share, p.value_share}));
  j = json{{"gini", c.gini}, {"lorenz", std::move(points)}};
}

void to_json(json& j, const EqualizationReport& r) {
  json scopes = json::array();
  for (const auto& s : r.scopes) {
    scopes.push_back(json{{"scope", s.scope},
                          {"before", s.before},
                          {"after", s.after},
                          {"delta", s.delta},
                          {"change_stats", s.change}});
  }
  j = json{{"before", r.before}, {"after", r.after}, {"delta", r.delta}, {"scopes", std::move(scopes)}};
}

ExpertResponse response_from_wire(const json& body, const std::string& expert_id, int round,
                                  std::int64_t submitted_at) {
  auto malformed = [](const std::string& what) { return Error(ErrorCode::Malformed, what); };
  if (!body.is_object()) throw malformed("response body must be a JSON object");
  for (const auto& [key, value] : body.items()) {
    if (key != "items" && key != "suggested_publishers") throw malformed("unexpected key '" + key + "'");
  }
  ExpertResponse response{expert_id, round, {}, {}, submitted_at};

  const auto items = body.find("items");
  if (items == body.end() || !items->is_array()) throw malformed("'items' must be an array");
  for (const auto& item : *items) {
    if (!item.is_object()) throw malformed("each item must be an object");
    ResponseItem r;
    for (const auto& [key, value] : item.items()) {
      if (key == "publisher") {
        if (!value.is_string()) throw malformed("'publisher' must be a string");
        r.publisher = value.get<std::string>();
      } else if (key == "scope") {
        if (!value.is_null()) {
          if (!value.is_string()) throw malformed("'scope' must be a string");
          r.scope = parse_scope(value.get<std::string>());
        }
      } else if (key == "known" || key == "disagree") {
        if (!value.is_boolean()) throw malformed("'" + key + "' must be a boolean");
        (key == "known" ? r.known : r.disagree) = value.get<bool>();
      } else if (key == "new_score") {
        if (!value.is_null()) {
          if (!value.is_number_integer()) throw malformed("'new_score' must be an integer");
          r.new_score = value.get<int>();
        }
      } else {
        throw malformed("unexpected item key '" + key + "'");
      }
    }
    if (r.publisher.empty()) throw malformed("item without 'publisher'");
    response.items.push_back(std::move(r));
  }

  if (auto sp = body.find("suggested_publishers"); sp != body.end() && !sp->is_null()) {
    if (!sp->is_array()) throw malformed("'suggested_publishers' must be an array");
    for (const auto& s : *sp) {
      if (!s.is_string()) throw malformed("suggested publishers must be strings");
      response.suggested_publishers.push_back(s.get<std::string>());
    }
  }
  return response;
}

}  // namespace pubcat
