#include "pubcat/gateway/service.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "pubcat/csv.hpp"
#include "pubcat/error.hpp"
#include "pubcat/gateway/serialization.hpp"
#include "pubcat/gateway/tokens.hpp"

namespace pubcat {

namespace {

std::int64_t system_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Roster subjects_of_field(const Roster& roster, const Field& field) {
  Roster out;
  for (const auto& s : roster.subjects) {
    if (Field::named(s.field).id == field.id) out.subjects.push_back(s);
  }
  return out;
}

PanelSummary summarize(const PanelRecord& r) {
  const Panel& p = r.current;
  PanelSummary s{p.id(), p.field(), p.state(), r.population, r.params, r.sample, {}, {}};
  s.answers = {static_cast<int>(p.responses(1).size()), static_cast<int>(p.responses(2).size())};
  s.list_sizes = {p.list(Scope::Domestic).entries.size(), p.list(Scope::Foreign).entries.size()};
  return s;
}

}  // namespace

int open_round_of(PanelState state) {
  switch (state) {
    case PanelState::Draft:
      throw Error(ErrorCode::RoundNotOpen, "no round is open yet");
    case PanelState::Round1Open:
      return 1;
    case PanelState::Round2Open:
      return 2;
    default:
      throw Error(ErrorCode::RoundClosed, "no round is open; the panel is " +
                                              std::string(panel_state_name(state)));
  }
}

Service::Service(FileStore& store, SamplingParams defaults, Clock clock, std::string link_base)
    : store_(store),
      defaults_(defaults),
      clock_(clock ? std::move(clock) : Clock(system_seconds)),
      link_base_(std::move(link_base)) {
  defaults_.validate();
  while (!link_base_.empty() && link_base_.back() == '/') link_base_.pop_back();
}

RankedList Service::import_ranking(const std::string& field_name, Scope scope, std::string_view csv) {
  if (field_name.empty()) throw Error(ErrorCode::Malformed, "field name is empty");
  const auto rows = parse_ranking_csv(csv);
  RankedList list = pubcat::import_ranking(rows, Field::named(field_name), scope);
  store_.save_ranking(list);
  return list;
}

std::size_t Service::import_roster(std::string_view csv) {
  const Roster roster = parse_roster_csv(csv);
  store_.merge_roster(roster);
  return roster.subjects.size();
}

PanelSummary Service::create_panel(const CreatePanelRequest& request) {
  if (request.field.empty()) throw Error(ErrorCode::Malformed, "field name is empty");
  const SamplingParams params = request.params.value_or(defaults_);
  params.validate();
  const Field wanted = Field::named(request.field);

  auto domestic = store_.load_ranking(wanted.id, Scope::Domestic);
  auto foreign = store_.load_ranking(wanted.id, Scope::Foreign);
  if (!domestic && !foreign) {
    throw Error(ErrorCode::UnknownRanking, "no ranking imported for field '" + request.field + "'");
  }
  const Field field = domestic ? domestic->field : foreign->field;
  if (!domestic) domestic = RankedList{field, Scope::Domestic, {}, {}};
  if (!foreign) foreign = RankedList{field, Scope::Foreign, {}, {}};

  const Roster population = subjects_of_field(store_.load_roster(), field);
  if (population.subjects.empty()) {
    throw Error(ErrorCode::EmptyInput, "no roster subjects for field '" + field.name + "'");
  }
  const int pop = static_cast<int>(population.subjects.size());
  const int n = request.sample_size ? *request.sample_size : required_sample_size(pop, params);
  if (n < 1) throw Error(ErrorCode::InvalidParams, "sample size must be positive");
  const auto drawn = draw_sample(population, static_cast<std::size_t>(n), request.seed);

  std::vector<std::string> ids;
  std::vector<SampledExpert> sample;
  for (const auto& s : drawn) {
    ids.push_back(s.expert_id);
    sample.push_back({s.expert_id, s.field, request.seed});
  }
  const std::string id = request.panel_id.value_or(field.id + "-" + std::to_string(request.seed));
  Panel panel(id, field, std::move(*domestic), std::move(*foreign), std::move(ids));
  PanelRecord record{panel.data(), params, pop, std::move(sample), {}, panel};
  store_.create_panel(record);
  return summarize(record);
}

std::vector<SampledExpert> Service::extend_panel(const ExtendPanelRequest& request) {
  if (request.count < 1) throw Error(ErrorCode::InvalidParams, "extension count must be positive");
  if (request.supplement) request.supplement->validate();
  auto added = store_.update_panel(request.panel_id, [&](PanelRecord& record) {
    const Field& field = record.current.field();
    std::vector<Subject> existing;
    for (const auto& s : record.sample) existing.push_back({s.expert_id, s.field, ""});

    Roster pool;
    if (request.supplement) {
      pool = subjects_of_field(*request.supplement, field);
    } else {
      std::set<std::string> taken(record.current.experts().begin(), record.current.experts().end());
      for (auto& s : subjects_of_field(store_.load_roster(), field).subjects) {
        if (!taken.contains(s.expert_id)) pool.subjects.push_back(std::move(s));
      }
    }
    const auto extended =
        extend_roster(existing, pool, static_cast<std::size_t>(request.count), request.seed);

    std::vector<SampledExpert> fresh;
    std::vector<std::string> ids;
    for (auto it = extended.begin() + static_cast<std::ptrdiff_t>(existing.size()); it != extended.end(); ++it) {
      fresh.push_back({it->expert_id, it->field, request.seed});
      ids.push_back(it->expert_id);
    }
    record.apply(AddExperts{ids});
    record.population += request.supplement ? static_cast<int>(pool.subjects.size()) : 0;
    record.sample.insert(record.sample.end(), fresh.begin(), fresh.end());
    return fresh;
  });
  if (request.supplement) store_.merge_roster(*request.supplement);
  return added;
}

PanelRecord Service::load(const std::string& panel_id) const { return store_.load_panel(panel_id); }

PanelSummary Service::panel(const std::string& panel_id) const { return summarize(load(panel_id)); }

std::vector<std::string> Service::panel_ids() const { return store_.panel_ids(); }

PanelState Service::apply(const std::string& panel_id, PanelCommand command) {
  return store_.update_panel(panel_id, [&](PanelRecord& record) {
    record.apply(std::move(command));
    return record.current.state();
  });
}

PanelState Service::open_round(const std::string& panel_id, int round) {
  return apply(panel_id, OpenRound{round});
}

PanelState Service::close_round(const std::string& panel_id, int round) {
  return apply(panel_id, CloseRound{round});
}

std::vector<FinalCategory> Service::finalize(const std::string& panel_id) {
  return store_.update_panel(panel_id, [&](PanelRecord& record) {
    record.apply(FinalizePanel{});
    return record.current.finals();
  });
}

TokenRecord Service::issue_token(const std::string& panel_id, const std::string& expert_id) {
  const PanelRecord record = load(panel_id);
  if (!record.current.is_sampled(expert_id)) {
    throw Error(ErrorCode::UnknownExpert, "expert '" + expert_id + "' is not sampled in panel '" +
                                              panel_id + "'");
  }
  TokenRecord issued;
  store_.update_tokens([&](std::map<std::string, TokenRecord>& tokens) {
    for (const auto& [key, t] : tokens) {
      if (t.panel_id == panel_id && t.expert_id == expert_id) {
        issued = t;
        return;
      }
    }
    std::string token;
    do {
      token = generate_token();
    } while (tokens.contains(token));
    issued = TokenRecord{token, panel_id, expert_id, clock_()};
    tokens.emplace(token, issued);
  });
  return issued;
}

TokenTarget Service::resolve_token(const std::string& token) const {
  const auto tokens = store_.load_tokens();
  const auto it = tokens.find(token);
  if (it == tokens.end()) throw Error(ErrorCode::UnknownToken, "unknown access token");
  return {it->second.panel_id, it->second.expert_id};
}

Questionnaire Service::questionnaire(const std::string& token) const {
  const TokenTarget target = resolve_token(token);
  const PanelRecord record = load(target.panel_id);
  const Panel& p = record.current;
  const int round = open_round_of(p.state());
  const auto eligible = p.eligible(round);
  if (std::find(eligible.begin(), eligible.end(), target.expert_id) == eligible.end()) {
    throw Error(ErrorCode::UnknownExpert,
                "expert '" + target.expert_id + "' is not invited to round " + std::to_string(round));
  }
  Questionnaire q{p.id(), p.field(), target.expert_id, round, p.build_questionnaire(round), {}};
  for (const auto& item : q.items) {
    const RankedEntry* entry = p.list(item.scope).find(item.publisher);
    q.initial_numeric.push_back(entry ? entry->category.numeric : item.displayed_numeric);
  }
  return q;
}

SubmissionReceipt Service::submit(const std::string& token, const nlohmann::json& body) {
  const TokenTarget target = resolve_token(token);
  return store_.update_panel(target.panel_id, [&](PanelRecord& record) {
    const int round = open_round_of(record.current.state());
    ExpertResponse response = response_from_wire(body, target.expert_id, round, clock_());
    const bool replaced = record.current.responses(round).contains(target.expert_id);
    SubmissionReceipt receipt{record.current.id(), target.expert_id, round, response.items.size(),
                              response.submitted_at, replaced};
    record.apply(SubmitResponse{std::move(response)});
    return receipt;
  });
}

RoundAggregates Service::aggregates(const std::string& panel_id, int round) const {
  return load(panel_id).current.aggregate_round(round);
}

std::vector<FinalCategory> Service::finals(const std::string& panel_id) const {
  return load(panel_id).current.finals();
}

std::string Service::finals_csv(const std::string& panel_id) const {
  return export_finals_csv(finals(panel_id));
}

std::vector<ResponseRateRow> Service::response_rates(const std::string& panel_id) const {
  return pubcat::response_rates(load(panel_id).current);
}

std::vector<ResponseRateRow> Service::response_rate_table() const {
  std::vector<ResponseRateRow> rows;
  for (const auto& id : store_.panel_ids()) {
    auto r = response_rates(id);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  for (int round : {1, 2}) {
    std::vector<ResponseRateRow> of_round;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(of_round),
                 [&](const ResponseRateRow& r) { return r.round == round; });
    if (!of_round.empty()) rows.push_back(total_response_rate(of_round, round));
  }
  return rows;
}

AnalyticsDocument Service::analytics(const std::string& panel_id) const {
  const PanelRecord record = load(panel_id);
  AnalyticsDocument doc{pubcat::response_rates(record.current), std::nullopt};
  if (record.current.state() == PanelState::Finalized) doc.equalization = equalization_report(record.current);
  return doc;
}

std::vector<MailingEntry> Service::mail_to(const std::string& panel_id,
                                           const std::vector<std::string>& ids) {
  const Roster roster = store_.load_roster();
  std::map<std::string, std::string> email;
  for (const auto& s : roster.subjects) email[s.expert_id] = s.contact;
  std::vector<MailingEntry> out;
  for (const auto& id : ids) {
    const TokenRecord t = issue_token(panel_id, id);
    out.push_back({id, email[id], t.token, link_base_ + "/q/" + t.token});
  }
  return out;
}

std::vector<MailingEntry> Service::mailing_list(const std::string& panel_id) {
  return mail_to(panel_id, load(panel_id).current.experts());
}

std::vector<MailingEntry> Service::reminders(const std::string& panel_id, int round) {
  return mail_to(panel_id, nonrespondents(panel_id, round));
}

std::vector<std::string> Service::nonrespondents(const std::string& panel_id, int round) const {
  return load(panel_id).current.nonrespondents(round);
}

std::string Service::sample_csv(const std::string& panel_id) const {
  const PanelRecord record = load(panel_id);
  std::string out = "expert_id,field,seed\n";
  for (const auto& s : record.sample) {
    out += csv::join({s.expert_id, s.field, std::to_string(s.seed)});
    out += '\n';
  }
  return out;
}

}  // namespace pubcat
