#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pubcat/ranking.hpp"

namespace pubcat {

/// Parameters of the finite-population sample-size formula.
/// Defaults: 95% confidence, +/-5% margin, maximal variance p = q = 0.5.
struct SamplingParams {
  double confidence_z = 1.96;
  double margin_e = 0.05;
  double proportion_p = 0.5;

  /// Throws InvalidParams unless z > 0, 0 < e < 1 and 0 < p < 1.
  void validate() const;

  bool operator==(const SamplingParams&) const = default;
};

struct Stratum {
  Field field;
  int population = 0;
};

struct SampleSpec {
  Field field;
  int sample_size = 0;

  bool operator==(const SampleSpec&) const = default;
};

struct Subject {
  std::string expert_id;
  std::string field;    // field name as written in the roster file
  std::string contact;  // e-mail, may be blank

  bool operator==(const Subject&) const = default;
};

struct Roster {
  std::vector<Subject> subjects;

  /// Subjects whose field matches `field_name` (exact match).
  Roster in_field(std::string_view field_name) const;
  /// Throws DuplicateExpert if an expert id repeats.
  void validate() const;
};

/// n = ceil(N z^2 p q / (e^2 (N - 1) + z^2 p q)), never above N.
int required_sample_size(int population, const SamplingParams& params = {});

/// One sample size per stratum; throws DuplicateField when two strata share
/// a field id.
std::vector<SampleSpec> allocate(std::span<const Stratum> strata,
                                 const SamplingParams& params = {});

/// Normalizes the roster by expert id, gives each subject a uniform draw in
/// [0, 1) from mt19937_64(seed) and keeps the `n` largest draws. The result
/// is in draw order (largest first).
std::vector<Subject> draw_sample(const Roster& roster, std::size_t n, std::uint64_t seed);

/// Draws `n_extra` subjects from `supplement` and appends them to `existing`.
/// Throws OverlapError if any supplement id is already in `existing`.
std::vector<Subject> extend_roster(std::span<const Subject> existing, const Roster& supplement,
                                   std::size_t n_extra, std::uint64_t seed);

/// `expert_id,field,email` with a header line.
Roster parse_roster_csv(std::string_view text);

/// `expert_id,field,seed`.
std::string export_sample_csv(std::span<const Subject> sample, std::uint64_t seed);

}  // namespace pubcat
