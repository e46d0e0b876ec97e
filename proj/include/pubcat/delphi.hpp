#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pubcat/ranking.hpp"

namespace pubcat {

enum class PanelState { Draft, Round1Open, Round1Closed, Round2Open, Round2Closed, Finalized };

std::string_view panel_state_name(PanelState state) noexcept;
PanelState parse_panel_state(std::string_view text);

/// A publisher is identified by its list (scope) and its name.
struct PublisherKey {
  Scope scope = Scope::Domestic;
  std::string publisher;

  auto operator<=>(const PublisherKey&) const = default;
  bool operator==(const PublisherKey&) const = default;
};

struct QuestionnaireItem {
  std::string publisher;
  Scope scope = Scope::Domestic;
  int displayed_numeric = 1;

  bool operator==(const QuestionnaireItem&) const = default;
};

/// One line of an expert's answer. `disagree` implies `known`, and a new
/// score is given exactly when the expert disagrees.
struct ResponseItem {
  std::string publisher;
  std::optional<Scope> scope;  // resolved on record when the name is unique
  bool known = false;
  bool disagree = false;
  std::optional<int> new_score;

  bool operator==(const ResponseItem&) const = default;
};

struct ExpertResponse {
  std::string expert_id;
  int round = 1;
  std::vector<ResponseItem> items;
  std::vector<std::string> suggested_publishers;  // kept verbatim, never aggregated
  std::int64_t submitted_at = 0;                  // unix seconds

  bool operator==(const ExpertResponse&) const = default;
};

/// Votes and integer score sum of the rescores a publisher got in one round.
struct PublisherRoundAggregate {
  PublisherKey key;
  int votes = 0;
  std::int64_t score_sum = 0;

  double mean_score() const { return static_cast<double>(score_sum) / votes; }

  bool operator==(const PublisherRoundAggregate&) const = default;
};

using RoundAggregates = std::map<PublisherKey, PublisherRoundAggregate>;

struct FinalCategory {
  std::string publisher;
  Scope scope = Scope::Domestic;
  int initial_numeric = 1;
  int round1_votes = 0;
  std::optional<double> round1_mean;
  int round2_votes = 0;
  std::optional<double> round2_mean;
  int final_numeric = 1;
  char final_letter = 'D';

  bool operator==(const FinalCategory&) const = default;
};

/// Everything a panel holds. Kept as a plain aggregate so the store can
/// serialize it; `Panel::restore` re-checks the invariants.
struct PanelData {
  std::string id;
  Field field;
  RankedList domestic;  // either list may be empty, not both
  RankedList foreign;
  std::vector<std::string> experts;  // sampled ids, draw order
  PanelState state = PanelState::Draft;
  std::array<std::map<std::string, ExpertResponse>, 2> responses;
  std::array<std::optional<RoundAggregates>, 2> snapshots;  // taken at round close
  std::vector<FinalCategory> finals;

  bool operator==(const PanelData&) const = default;
};

/// One field's two-round consultation. Commands mutate in place and are
/// meant to be applied by a single writer; const queries are safe to share.
class Panel {
 public:
  Panel(std::string id, Field field, RankedList domestic, RankedList foreign,
        std::vector<std::string> experts);

  static Panel restore(PanelData data);

  const PanelData& data() const noexcept { return data_; }
  const std::string& id() const noexcept { return data_.id; }
  const Field& field() const noexcept { return data_.field; }
  PanelState state() const noexcept { return data_.state; }
  const std::vector<std::string>& experts() const noexcept { return data_.experts; }
  const RankedList& list(Scope scope) const noexcept;
  bool is_sampled(std::string_view expert_id) const;

  /// Experts allowed to answer `round`: the sample for round 1, the round-1
  /// respondents for round 2.
  std::vector<std::string> eligible(int round) const;
  const std::map<std::string, ExpertResponse>& responses(int round) const;

  void open_round(int round);
  /// Closing a round freezes its aggregates.
  void close_round(int round);
  /// Adds supplementary experts to the round-1 sample (Draft or Round1Open).
  void add_experts(std::span<const std::string> expert_ids);

  std::vector<QuestionnaireItem> build_questionnaire(int round) const;
  /// Validates and stores; a later response by the same expert for the same
  /// round replaces the earlier one.
  void record_response(ExpertResponse response);
  RoundAggregates aggregate_round(int round) const;
  const std::vector<FinalCategory>& finalize();
  const std::vector<FinalCategory>& finals() const;
  std::vector<std::string> nonrespondents(int round) const;

  bool operator==(const Panel&) const = default;

 private:
  explicit Panel(PanelData data);
  void check_invariants() const;
  PublisherKey resolve(const ResponseItem& item) const;
  RoundAggregates compute_aggregates(int round) const;
  int displayed_numeric(const PublisherKey& key, int initial, int round) const;

  PanelData data_;
};

struct OpenRound {
  int round = 1;
  bool operator==(const OpenRound&) const = default;
};
struct CloseRound {
  int round = 1;
  bool operator==(const CloseRound&) const = default;
};
struct SubmitResponse {
  ExpertResponse response;
  bool operator==(const SubmitResponse&) const = default;
};
struct AddExperts {
  std::vector<std::string> expert_ids;
  bool operator==(const AddExperts&) const = default;
};
struct FinalizePanel {
  bool operator==(const FinalizePanel&) const = default;
};

/// A state-changing step; a panel is the fold of its creation plus its log.
using PanelCommand = std::variant<OpenRound, CloseRound, SubmitResponse, AddExperts, FinalizePanel>;

void apply_command(Panel& panel, const PanelCommand& command);

/// `publisher,scope,initial_numeric,round1_votes,round1_mean,round2_votes,round2_mean,final_numeric,final_letter`.
/// Means use the shortest round-trip decimal form and are blank without votes.
std::string export_finals_csv(std::span<const FinalCategory> finals);

}  // namespace pubcat
