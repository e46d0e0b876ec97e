#include "pubcat/delphi.hpp"

#include <algorithm>
#include <set>

#include "pubcat/csv.hpp"
#include "pubcat/error.hpp"

namespace pubcat {

namespace {

constexpr std::array kStateNames = {"draft",        "round1_open",   "round1_closed",
                                    "round2_open",  "round2_closed", "finalized"};

void check_round(int round) {
  if (round != 1 && round != 2) {
    throw Error(ErrorCode::OutOfRange, "round must be 1 or 2, got " + std::to_string(round));
  }
}

PanelState open_state(int round) { return round == 1 ? PanelState::Round1Open : PanelState::Round2Open; }
PanelState closed_state(int round) {
  return round == 1 ? PanelState::Round1Closed : PanelState::Round2Closed;
}

// Exact mean of integer scores as a fraction, so averaging and half-up
// rounding never depend on floating-point representation.
struct Fraction {
  std::int64_t num;
  std::int64_t den;
};

int round_half_up(Fraction f) {
  return static_cast<int>((2 * f.num + f.den) / (2 * f.den));
}

Fraction midpoint(Fraction a, Fraction b) {
  return {a.num * b.den + b.num * a.den, 2 * a.den * b.den};
}

[[noreturn]] void transition_error(PanelState from, std::string_view what) {
  throw Error(ErrorCode::IllegalTransition, "cannot " + std::string(what) + " while panel is " +
                                                std::string(panel_state_name(from)));
}

}  // namespace

std::string_view panel_state_name(PanelState state) noexcept {
  return kStateNames[static_cast<std::size_t>(state)];
}

PanelState parse_panel_state(std::string_view text) {
  for (std::size_t i = 0; i < kStateNames.size(); ++i) {
    if (text == kStateNames[i]) return static_cast<PanelState>(i);
  }
  throw Error(ErrorCode::CorruptRecord, "unknown panel state: " + std::string(text));
}

Panel::Panel(std::string id, Field field, RankedList domestic, RankedList foreign,
             std::vector<std::string> experts)
    : data_{std::move(id), std::move(field), std::move(domestic), std::move(foreign),
            std::move(experts), PanelState::Draft, {}, {}, {}} {
  check_invariants();
}

Panel::Panel(PanelData data) : data_(std::move(data)) {}

Panel Panel::restore(PanelData data) {
  Panel panel(std::move(data));
  try {
    panel.check_invariants();
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptRecord, "panel '" + panel.id() + "': " + e.what());
  }
  return panel;
}

void Panel::check_invariants() const {
  if (data_.id.empty()) throw Error(ErrorCode::Malformed, "panel id is empty");
  if (data_.field.name.empty()) throw Error(ErrorCode::Malformed, "panel field name is empty");
  if (data_.domestic.entries.empty() && data_.foreign.entries.empty()) {
    throw Error(ErrorCode::EmptyInput, "panel needs at least one ranked list");
  }
  for (Scope scope : kScopes) {
    const RankedList& l = list(scope);
    if (l.entries.empty()) continue;
    if (l.scope != scope) throw Error(ErrorCode::Malformed, "ranked list has the wrong scope");
    if (l.field.id != data_.field.id) {
      throw Error(ErrorCode::Malformed, "ranked list belongs to field '" + l.field.name + "'");
    }
  }
  if (data_.experts.empty()) throw Error(ErrorCode::EmptyInput, "panel has no sampled experts");
  std::set<std::string_view> ids;
  for (const auto& e : data_.experts) {
    if (!ids.insert(e).second) throw Error(ErrorCode::DuplicateExpert, "duplicate expert: " + e);
  }
  for (int r = 1; r <= 2; ++r) {
    for (const auto& [expert, response] : data_.responses[r - 1]) {
      if (expert != response.expert_id || response.round != r || !ids.contains(expert)) {
        throw Error(ErrorCode::UnknownExpert, "stored response does not match the panel: " + expert);
      }
    }
  }
}

const RankedList& Panel::list(Scope scope) const noexcept {
  return scope == Scope::Domestic ? data_.domestic : data_.foreign;
}

bool Panel::is_sampled(std::string_view expert_id) const {
  return std::find(data_.experts.begin(), data_.experts.end(), expert_id) != data_.experts.end();
}

std::vector<std::string> Panel::eligible(int round) const {
  check_round(round);
  if (round == 1) return data_.experts;
  std::vector<std::string> out;
  for (const auto& e : data_.experts) {
    if (data_.responses[0].contains(e)) out.push_back(e);
  }
  return out;
}

const std::map<std::string, ExpertResponse>& Panel::responses(int round) const {
  check_round(round);
  return data_.responses[round - 1];
}

void Panel::open_round(int round) {
  check_round(round);
  const PanelState required = round == 1 ? PanelState::Draft : PanelState::Round1Closed;
  if (data_.state != required) transition_error(data_.state, "open round " + std::to_string(round));
  data_.state = open_state(round);
}

void Panel::close_round(int round) {
  check_round(round);
  if (data_.state != open_state(round)) {
    transition_error(data_.state, "close round " + std::to_string(round));
  }
  data_.snapshots[round - 1] = compute_aggregates(round);
  data_.state = closed_state(round);
}

void Panel::add_experts(std::span<const std::string> expert_ids) {
  if (data_.state != PanelState::Draft && data_.state != PanelState::Round1Open) {
    transition_error(data_.state, "extend the sample");
  }
  std::set<std::string_view> incoming;
  for (const auto& id : expert_ids) {
    if (id.empty()) throw Error(ErrorCode::Malformed, "empty expert id");
    if (is_sampled(id) || !incoming.insert(id).second) {
      throw Error(ErrorCode::OverlapError, "expert already in the sample: " + id);
    }
  }
  data_.experts.insert(data_.experts.end(), expert_ids.begin(), expert_ids.end());
}

int Panel::displayed_numeric(const PublisherKey& key, int initial, int round) const {
  if (round == 1) return initial;
  const auto& snap = data_.snapshots[0];
  if (!snap) return initial;
  auto it = snap->find(key);
  if (it == snap->end() || it->second.votes == 0) return initial;
  return round_half_up({it->second.score_sum, it->second.votes});
}

std::vector<QuestionnaireItem> Panel::build_questionnaire(int round) const {
  check_round(round);
  if (data_.state != open_state(round)) {
    throw Error(ErrorCode::RoundNotOpen, "round " + std::to_string(round) + " is not open");
  }
  std::vector<QuestionnaireItem> items;
  for (Scope scope : kScopes) {
    for (const auto& e : list(scope).entries) {
      const PublisherKey key{scope, e.publisher};
      items.push_back({e.publisher, scope, displayed_numeric(key, e.category.numeric, round)});
    }
  }
  return items;
}

PublisherKey Panel::resolve(const ResponseItem& item) const {
  if (item.scope) {
    if (!list(*item.scope).find(item.publisher)) {
      throw Error(ErrorCode::UnknownPublisher, "publisher not in the " +
                                                   std::string(scope_name(*item.scope)) +
                                                   " list: " + item.publisher);
    }
    return {*item.scope, item.publisher};
  }
  const bool domestic = data_.domestic.find(item.publisher) != nullptr;
  const bool foreign = data_.foreign.find(item.publisher) != nullptr;
  if (domestic && foreign) {
    throw Error(ErrorCode::AmbiguousPublisher,
                "publisher appears in both lists, give a scope: " + item.publisher);
  }
  if (!domestic && !foreign) {
    throw Error(ErrorCode::UnknownPublisher, "publisher not in the panel lists: " + item.publisher);
  }
  return {domestic ? Scope::Domestic : Scope::Foreign, item.publisher};
}

void Panel::record_response(ExpertResponse response) {
  const int round = response.round;
  check_round(round);
  if (data_.state != open_state(round)) {
    if (data_.state > open_state(round)) {
      throw Error(ErrorCode::RoundClosed, "round " + std::to_string(round) + " is closed");
    }
    throw Error(ErrorCode::RoundNotOpen, "round " + std::to_string(round) + " is not open");
  }
  if (!is_sampled(response.expert_id)) {
    throw Error(ErrorCode::UnknownExpert, "expert not in the panel sample: " + response.expert_id);
  }
  if (round == 2 && !data_.responses[0].contains(response.expert_id)) {
    throw Error(ErrorCode::UnknownExpert,
                "round 2 is limited to round-1 respondents: " + response.expert_id);
  }

  std::set<PublisherKey> seen;
  for (auto& item : response.items) {
    const PublisherKey key = resolve(item);
    item.scope = key.scope;
    if (!seen.insert(key).second) {
      throw Error(ErrorCode::InconsistentItem, "publisher listed twice: " + item.publisher);
    }
    if (item.disagree && !item.known) {
      throw Error(ErrorCode::InconsistentItem, "cannot disagree on an unknown publisher: " +
                                                   item.publisher);
    }
    if (item.disagree != item.new_score.has_value()) {
      throw Error(ErrorCode::InconsistentItem,
                  "a new score is required exactly when disagreeing: " + item.publisher);
    }
    if (item.new_score && (*item.new_score < 1 || *item.new_score > 4)) {
      throw Error(ErrorCode::InconsistentItem,
                  "new score must be in 1..4 for " + item.publisher + ", got " +
                      std::to_string(*item.new_score));
    }
  }
  data_.responses[round - 1][response.expert_id] = std::move(response);
}

RoundAggregates Panel::compute_aggregates(int round) const {
  RoundAggregates out;
  for (const auto& [expert, response] : data_.responses[round - 1]) {
    for (const auto& item : response.items) {
      if (!item.new_score) continue;
      PublisherKey key{*item.scope, item.publisher};
      auto& agg = out[key];
      agg.key = key;
      ++agg.votes;
      agg.score_sum += *item.new_score;
    }
  }
  return out;
}

RoundAggregates Panel::aggregate_round(int round) const {
  check_round(round);
  const auto& snap = data_.snapshots[round - 1];
  if (!snap) {
    throw Error(ErrorCode::RoundNotClosed, "round " + std::to_string(round) + " is not closed");
  }
  return *snap;
}

const std::vector<FinalCategory>& Panel::finalize() {
  if (data_.state != PanelState::Round2Closed) transition_error(data_.state, "finalize");

  const RoundAggregates& r1 = *data_.snapshots[0];
  const RoundAggregates& r2 = *data_.snapshots[1];
  std::vector<FinalCategory> finals;
  for (Scope scope : kScopes) {
    for (const auto& e : list(scope).entries) {
      const PublisherKey key{scope, e.publisher};
      FinalCategory f;
      f.publisher = e.publisher;
      f.scope = scope;
      f.initial_numeric = e.category.numeric;

      const int shown2 = displayed_numeric(key, f.initial_numeric, 2);
      Fraction eff1{f.initial_numeric, 1};
      Fraction eff2{shown2, 1};
      if (auto it = r1.find(key); it != r1.end() && it->second.votes > 0) {
        f.round1_votes = it->second.votes;
        f.round1_mean = it->second.mean_score();
        eff1 = {it->second.score_sum, it->second.votes};
      }
      if (auto it = r2.find(key); it != r2.end() && it->second.votes > 0) {
        f.round2_votes = it->second.votes;
        f.round2_mean = it->second.mean_score();
        eff2 = {it->second.score_sum, it->second.votes};
      }
      f.final_numeric = round_half_up(midpoint(eff1, eff2));
      f.final_letter = category_from_numeric(f.final_numeric).letter;
      finals.push_back(std::move(f));
    }
  }
  data_.finals = std::move(finals);
  data_.state = PanelState::Finalized;
  return data_.finals;
}

const std::vector<FinalCategory>& Panel::finals() const {
  if (data_.state != PanelState::Finalized) {
    throw Error(ErrorCode::NotFinalized, "panel '" + data_.id + "' is not finalized");
  }
  return data_.finals;
}

std::vector<std::string> Panel::nonrespondents(int round) const {
  check_round(round);
  if (data_.state < open_state(round)) {
    throw Error(ErrorCode::RoundNotStarted, "round " + std::to_string(round) + " has not started");
  }
  std::vector<std::string> out;
  for (auto& e : eligible(round)) {
    if (!data_.responses[round - 1].contains(e)) out.push_back(std::move(e));
  }
  return out;
}

void apply_command(Panel& panel, const PanelCommand& command) {
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, OpenRound>) {
          panel.open_round(c.round);
        } else if constexpr (std::is_same_v<T, CloseRound>) {
          panel.close_round(c.round);
        } else if constexpr (std::is_same_v<T, SubmitResponse>) {
          panel.record_response(c.response);
        } else if constexpr (std::is_same_v<T, AddExperts>) {
          panel.add_experts(c.expert_ids);
        } else {
          panel.finalize();
        }
      },
      command);
}

std::string export_finals_csv(std::span<const FinalCategory> finals) {
  std::string out =
      "publisher,scope,initial_numeric,round1_votes,round1_mean,round2_votes,round2_mean,"
      "final_numeric,final_letter\n";
  auto mean = [](const std::optional<double>& m) { return m ? csv::format_number(*m) : ""; };
  for (const auto& f : finals) {
    out += csv::join({f.publisher, std::string(scope_name(f.scope)), std::to_string(f.initial_numeric),
                      std::to_string(f.round1_votes), mean(f.round1_mean),
                      std::to_string(f.round2_votes), mean(f.round2_mean),
                      std::to_string(f.final_numeric), std::string(1, f.final_letter)});
    out += '\n';
  }
  return out;
}

}  // namespace pubcat
