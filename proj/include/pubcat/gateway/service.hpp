#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pubcat/analytics.hpp"
#include "pubcat/delphi.hpp"
#include "pubcat/gateway/store.hpp"
#include "pubcat/ranking.hpp"
#include "pubcat/sampling.hpp"

namespace pubcat {

struct CreatePanelRequest {
  std::string field;  // field name; matched against roster fields by slug
  std::uint64_t seed = 0;
  std::optional<SamplingParams> params;  // service defaults when absent
  std::optional<std::string> panel_id;   // "<field-id>-<seed>" when absent
  std::optional<int> sample_size;        // overrides the formula
};

struct ExtendPanelRequest {
  std::string panel_id;
  int count = 0;
  std::uint64_t seed = 0;
  /// Supplementary subjects; merged into the roster. When absent the draw
  /// uses the roster subjects of the field that are not yet sampled.
  std::optional<Roster> supplement;
};

struct MailingEntry {
  std::string expert_id;
  std::string email;
  std::string token;
  std::string link;

  bool operator==(const MailingEntry&) const = default;
};

struct TokenTarget {
  std::string panel_id;
  std::string expert_id;
};

struct Questionnaire {
  std::string panel_id;
  Field field;
  std::string expert_id;
  int round = 1;
  std::vector<QuestionnaireItem> items;
  std::vector<int> initial_numeric;  // round-1 display value, parallel to items
};

struct SubmissionReceipt {
  std::string panel_id;
  std::string expert_id;
  int round = 1;
  std::size_t items = 0;
  std::int64_t submitted_at = 0;
  bool replaced = false;
};

struct PanelSummary {
  std::string id;
  Field field;
  PanelState state = PanelState::Draft;
  int population = 0;
  SamplingParams params;
  std::vector<SampledExpert> sample;
  std::array<int, 2> answers{};
  std::array<std::size_t, 2> list_sizes{};  // domestic, foreign
};

struct AnalyticsDocument {
  std::vector<ResponseRateRow> response_rates;
  std::optional<EqualizationReport> equalization;  // set once finalized
};

/// Operations behind both the HTTP API and the CLI. Every state change is
/// written to the store before the call returns.
class Service {
 public:
  using Clock = std::function<std::int64_t()>;

  explicit Service(FileStore& store, SamplingParams defaults = {}, Clock clock = {},
                   std::string link_base = "http://localhost:8080");

  FileStore& store() noexcept { return store_; }
  const SamplingParams& defaults() const noexcept { return defaults_; }

  RankedList import_ranking(const std::string& field_name, Scope scope, std::string_view csv);
  /// Returns the number of subjects read.
  std::size_t import_roster(std::string_view csv);

  PanelSummary create_panel(const CreatePanelRequest& request);
  /// Returns the experts added.
  std::vector<SampledExpert> extend_panel(const ExtendPanelRequest& request);
  PanelSummary panel(const std::string& panel_id) const;
  std::vector<std::string> panel_ids() const;

  PanelState open_round(const std::string& panel_id, int round);
  PanelState close_round(const std::string& panel_id, int round);
  std::vector<FinalCategory> finalize(const std::string& panel_id);

  /// Throws UnknownExpert unless the expert is in the panel sample. Reuses
  /// the token already issued for the pair.
  TokenRecord issue_token(const std::string& panel_id, const std::string& expert_id);
  /// Throws UnknownToken.
  TokenTarget resolve_token(const std::string& token) const;

  /// The expert's questionnaire for the panel's open round.
  Questionnaire questionnaire(const std::string& token) const;
  SubmissionReceipt submit(const std::string& token, const nlohmann::json& body);

  RoundAggregates aggregates(const std::string& panel_id, int round) const;
  std::vector<FinalCategory> finals(const std::string& panel_id) const;
  std::string finals_csv(const std::string& panel_id) const;
  std::vector<ResponseRateRow> response_rates(const std::string& panel_id) const;
  /// Rows of every panel followed by one TOTAL row per started round.
  std::vector<ResponseRateRow> response_rate_table() const;
  AnalyticsDocument analytics(const std::string& panel_id) const;

  /// One entry per sampled expert, issuing tokens as needed.
  std::vector<MailingEntry> mailing_list(const std::string& panel_id);
  /// Entries for experts who may still answer `round` but have not.
  std::vector<MailingEntry> reminders(const std::string& panel_id, int round);
  std::vector<std::string> nonrespondents(const std::string& panel_id, int round) const;

  std::string sample_csv(const std::string& panel_id) const;

 private:
  PanelRecord load(const std::string& panel_id) const;
  std::vector<MailingEntry> mail_to(const std::string& panel_id, const std::vector<std::string>& ids);
  PanelState apply(const std::string& panel_id, PanelCommand command);

  FileStore& store_;
  SamplingParams defaults_;
  Clock clock_;
  std::string link_base_;
};

/// Round open for answers in `state`; throws RoundNotOpen before round 1
/// opens and RoundClosed while no round is open afterwards.
int open_round_of(PanelState state);

}  // namespace pubcat
