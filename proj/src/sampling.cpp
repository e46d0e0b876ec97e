#include "pubcat/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "pubcat/csv.hpp"
#include "pubcat/error.hpp"

namespace pubcat {

void SamplingParams::validate() const {
  if (!(confidence_z > 0.0) || !std::isfinite(confidence_z)) {
    throw Error(ErrorCode::InvalidParams, "confidence z must be positive");
  }
  if (!(margin_e > 0.0 && margin_e < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "margin e must lie in (0, 1)");
  }
  if (!(proportion_p > 0.0 && proportion_p < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "proportion p must lie in (0, 1)");
  }
}

Roster Roster::in_field(std::string_view field_name) const {
  Roster out;
  for (const auto& s : subjects) {
    if (s.field == field_name) out.subjects.push_back(s);
  }
  return out;
}

void Roster::validate() const {
  std::set<std::string_view> ids;
  for (const auto& s : subjects) {
    if (s.expert_id.empty()) throw Error(ErrorCode::Malformed, "roster row without expert id");
    if (!ids.insert(s.expert_id).second) {
      throw Error(ErrorCode::DuplicateExpert, "duplicate expert id: " + s.expert_id);
    }
  }
}

int required_sample_size(int population, const SamplingParams& params) {
  params.validate();
  if (population < 1) throw Error(ErrorCode::InvalidParams, "population must be at least 1");

  const double n_pop = population;
  const double z2pq =
      params.confidence_z * params.confidence_z * params.proportion_p * (1.0 - params.proportion_p);
  const double e2 = params.margin_e * params.margin_e;
  const double n = n_pop * z2pq / (e2 * (n_pop - 1.0) + z2pq);
  // Shave rounding noise so an exact integer (N = 1 gives 1.0) does not tip up.
  const auto rounded = static_cast<int>(std::ceil(n - 1e-9));
  return std::clamp(rounded, 1, population);
}

std::vector<SampleSpec> allocate(std::span<const Stratum> strata, const SamplingParams& params) {
  if (strata.empty()) throw Error(ErrorCode::EmptyInput, "no strata given");
  std::set<std::string> fields;
  std::vector<SampleSpec> out;
  out.reserve(strata.size());
  for (const auto& s : strata) {
    if (!fields.insert(s.field.id).second) {
      throw Error(ErrorCode::DuplicateField, "duplicate stratum field: " + s.field.name);
    }
    out.push_back(SampleSpec{s.field, required_sample_size(s.population, params)});
  }
  return out;
}

std::vector<Subject> draw_sample(const Roster& roster, std::size_t n, std::uint64_t seed) {
  roster.validate();
  if (n < 1) throw Error(ErrorCode::InvalidParams, "sample size must be at least 1");
  if (n > roster.subjects.size()) {
    throw Error(ErrorCode::SampleTooLarge, "cannot draw " + std::to_string(n) + " from a roster of " +
                                               std::to_string(roster.subjects.size()));
  }

  std::vector<Subject> ordered = roster.subjects;
  std::sort(ordered.begin(), ordered.end(),
            [](const Subject& a, const Subject& b) { return a.expert_id < b.expert_id; });

  // mt19937_64 output is fixed by the standard; the 53-bit conversion is
  // written out because std::uniform_real_distribution is not portable.
  std::mt19937_64 engine(seed);
  struct Drawn {
    double u;
    std::size_t index;
  };
  std::vector<Drawn> drawn;
  drawn.reserve(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    drawn.push_back({static_cast<double>(engine() >> 11) * 0x1.0p-53, i});
  }
  std::stable_sort(drawn.begin(), drawn.end(),
                   [](const Drawn& a, const Drawn& b) { return a.u > b.u; });

  std::vector<Subject> sample;
  sample.reserve(n);
  for (std::size_t k = 0; k < n; ++k) sample.push_back(ordered[drawn[k].index]);
  return sample;
}

std::vector<Subject> extend_roster(std::span<const Subject> existing, const Roster& supplement,
                                   std::size_t n_extra, std::uint64_t seed) {
  std::set<std::string_view> ids;
  for (const auto& s : existing) ids.insert(s.expert_id);
  for (const auto& s : supplement.subjects) {
    if (ids.contains(s.expert_id)) {
      throw Error(ErrorCode::OverlapError, "expert already in the sample: " + s.expert_id);
    }
  }
  std::vector<Subject> merged(existing.begin(), existing.end());
  for (auto& s : draw_sample(supplement, n_extra, seed)) merged.push_back(std::move(s));
  return merged;
}

Roster parse_roster_csv(std::string_view text) {
  Roster roster;
  for (auto& row : csv::parse_with_header(text, {"expert_id", "field", "email"})) {
    roster.subjects.push_back(Subject{std::move(row[0]), std::move(row[1]), std::move(row[2])});
  }
  roster.validate();
  return roster;
}

std::string export_sample_csv(std::span<const Subject> sample, std::uint64_t seed) {
  std::string out = "expert_id,field,seed\n";
  for (const auto& s : sample) {
    out += csv::join({s.expert_id, s.field, std::to_string(seed)});
    out += '\n';
  }
  return out;
}

}  // namespace pubcat
