#pragma once

// JSON mapping of the domain types. Field names are lower_snake_case and
// doubles keep full round-trip precision.

#include "json.hpp"
#include "pubcat/analytics.hpp"
#include "pubcat/delphi.hpp"
#include "pubcat/ranking.hpp"
#include "pubcat/sampling.hpp"

namespace pubcat {

using json = nlohmann::json;

void to_json(json& j, const Field& f);
void from_json(const json& j, Field& f);
void to_json(json& j, Scope s);
void from_json(const json& j, Scope& s);
void to_json(json& j, const RankedEntry& e);
void from_json(const json& j, RankedEntry& e);
void to_json(json& j, const RankedList& l);
void from_json(const json& j, RankedList& l);
void to_json(json& j, const SamplingParams& p);
void from_json(const json& j, SamplingParams& p);
void to_json(json& j, const Subject& s);
void from_json(const json& j, Subject& s);

void to_json(json& j, const QuestionnaireItem& q);
void to_json(json& j, const ResponseItem& r);
void from_json(const json& j, ResponseItem& r);
void to_json(json& j, const ExpertResponse& r);
void from_json(const json& j, ExpertResponse& r);
void to_json(json& j, const PublisherRoundAggregate& a);
void from_json(const json& j, PublisherRoundAggregate& a);
void to_json(json& j, const FinalCategory& f);
void from_json(const json& j, FinalCategory& f);
void to_json(json& j, const PanelData& p);
void from_json(const json& j, PanelData& p);
void to_json(json& j, const PanelCommand& c);
void from_json(const json& j, PanelCommand& c);

void to_json(json& j, const ResponseRateRow& r);
void to_json(json& j, const ChangeStats& c);
void to_json(json& j, const ConcentrationResult& c);
void to_json(json& j, const EqualizationReport& r);

json aggregates_to_json(const RoundAggregates& aggregates);

/// Reads the body an expert posts for a questionnaire. Stricter than
/// from_json: unknown item keys and non-integer scores are rejected.
/// Throws Malformed.
ExpertResponse response_from_wire(const json& body, const std::string& expert_id, int round,
                                  std::int64_t submitted_at);

}  // namespace pubcat
