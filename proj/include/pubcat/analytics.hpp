#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pubcat/delphi.hpp"
#include "pubcat/ranking.hpp"

namespace pubcat {

struct ResponseRateRow {
  Field field;
  int round = 1;
  int sample_n = 0;
  int answers = 0;
  double rate_percent = 0.0;  // rounded to two decimals
  bool provisional = false;   // round still open

  bool operator==(const ResponseRateRow&) const = default;
};

struct ChangeStats {
  Scope scope = Scope::Domestic;
  int publishers = 0;
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation

  bool operator==(const ChangeStats&) const = default;
};

struct LorenzPoint {
  double population_share = 0.0;
  double value_share = 0.0;

  bool operator==(const LorenzPoint&) const = default;
};

struct ConcentrationResult {
  double gini = 0.0;
  std::vector<LorenzPoint> lorenz;

  bool operator==(const ConcentrationResult&) const = default;
};

struct ScopeEqualization {
  Scope scope = Scope::Domestic;
  ConcentrationResult before;
  ConcentrationResult after;
  double delta = 0.0;
  ChangeStats change;
};

struct EqualizationReport {
  ConcentrationResult before;  // all publishers of the panel
  ConcentrationResult after;
  double delta = 0.0;  // gini before minus gini after
  std::vector<ScopeEqualization> scopes;  // one per non-empty list
};

/// Two rows per started round. Round 1 is measured against the sample,
/// round 2 against the round-1 respondents.
std::vector<ResponseRateRow> response_rates(const Panel& panel);

/// Sums several fields' rows of the same round into one TOTAL row.
ResponseRateRow total_response_rate(std::span<const ResponseRateRow> rows, int round);

double rate_percent(int answers, int sample_n);

/// Mean and population SD of final minus initial numeric per publisher.
/// Throws KeyMismatch unless both maps hold the same publishers.
ChangeStats change_stats(const std::map<std::string, int>& initial,
                         const std::map<std::string, int>& final_numeric, Scope scope);

/// Discrete Gini index sum_i (2i - n - 1) x_(i) / (n sum x) over ascending
/// values; 0 for equal values and at most (n - 1) / n.
/// Throws AllZero without a positive value, OutOfRange on a negative one.
double gini(std::span<const double> values);

/// (0,0) followed by (k/n, cumulative share of the k smallest values).
std::vector<LorenzPoint> lorenz(std::span<const double> values);

ConcentrationResult concentration(std::span<const double> values);

/// Gini and Lorenz of the initial versus the final category numerics.
/// Throws NotFinalized.
EqualizationReport equalization_report(const Panel& panel);

}  // namespace pubcat
