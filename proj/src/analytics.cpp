#include "pubcat/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pubcat/error.hpp"

namespace pubcat {

namespace {

std::vector<double> sorted_checked(std::span<const double> values) {
  std::vector<double> xs(values.begin(), values.end());
  bool positive = false;
  for (double x : xs) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::OutOfRange, "concentration needs finite non-negative values");
    }
    positive = positive || x > 0.0;
  }
  if (!positive) throw Error(ErrorCode::AllZero, "concentration needs a positive value");
  std::sort(xs.begin(), xs.end());
  return xs;
}

}  // namespace

double rate_percent(int answers, int sample_n) {
  if (sample_n <= 0) return 0.0;
  return std::round(10000.0 * answers / sample_n) / 100.0;
}

std::vector<ResponseRateRow> response_rates(const Panel& panel) {
  std::vector<ResponseRateRow> rows;
  const PanelState state = panel.state();
  if (state == PanelState::Draft) return rows;

  const int sample1 = static_cast<int>(panel.experts().size());
  const int answers1 = static_cast<int>(panel.responses(1).size());
  rows.push_back({panel.field(), 1, sample1, answers1, rate_percent(answers1, sample1),
                  state == PanelState::Round1Open});

  if (state >= PanelState::Round2Open) {
    const int answers2 = static_cast<int>(panel.responses(2).size());
    rows.push_back({panel.field(), 2, answers1, answers2, rate_percent(answers2, answers1),
                    state == PanelState::Round2Open});
  }
  return rows;
}

ResponseRateRow total_response_rate(std::span<const ResponseRateRow> rows, int round) {
  ResponseRateRow total{Field{"total", "TOTAL"}, round, 0, 0, 0.0, false};
  for (const auto& r : rows) {
    if (r.round != round) continue;
    total.sample_n += r.sample_n;
    total.answers += r.answers;
    total.provisional = total.provisional || r.provisional;
  }
  total.rate_percent = rate_percent(total.answers, total.sample_n);
  return total;
}

ChangeStats change_stats(const std::map<std::string, int>& initial,
                         const std::map<std::string, int>& final_numeric, Scope scope) {
  if (initial.size() != final_numeric.size()) {
    throw Error(ErrorCode::KeyMismatch, "initial and final publisher sets differ in size");
  }
  ChangeStats stats{scope, static_cast<int>(initial.size()), 0.0, 0.0};
  if (initial.empty()) return stats;

  std::vector<double> deltas;
  deltas.reserve(initial.size());
  for (const auto& [publisher, before] : initial) {
    auto it = final_numeric.find(publisher);
    if (it == final_numeric.end()) {
      throw Error(ErrorCode::KeyMismatch, "no final category for " + publisher);
    }
    deltas.push_back(static_cast<double>(it->second - before));
  }
  const double n = static_cast<double>(deltas.size());
  stats.mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / n;
  double ss = 0.0;
  for (double d : deltas) ss += (d - stats.mean) * (d - stats.mean);
  stats.sd = std::sqrt(ss / n);
  return stats;
}

double gini(std::span<const double> values) {
  const auto xs = sorted_checked(values);
  const double n = static_cast<double>(xs.size());
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * xs[i];
    total += xs[i];
  }
  // Float noise can push a perfectly equal vector a hair below zero.
  return std::max(0.0, weighted / (n * total));
}

std::vector<LorenzPoint> lorenz(std::span<const double> values) {
  const auto xs = sorted_checked(values);
  const double total = std::accumulate(xs.begin(), xs.end(), 0.0);
  const double n = static_cast<double>(xs.size());
  std::vector<LorenzPoint> points;
  points.reserve(xs.size() + 1);
  points.push_back({0.0, 0.0});
  double running = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    running += xs[k];
    points.push_back({static_cast<double>(k + 1) / n, running / total});
  }
  points.back() = {1.0, 1.0};
  return points;
}

ConcentrationResult concentration(std::span<const double> values) {
  return {gini(values), lorenz(values)};
}

EqualizationReport equalization_report(const Panel& panel) {
  const auto& finals = panel.finals();

  EqualizationReport report;
  std::vector<double> all_before;
  std::vector<double> all_after;
  for (Scope scope : kScopes) {
    std::vector<double> before;
    std::vector<double> after;
    std::map<std::string, int> initial_map;
    std::map<std::string, int> final_map;
    for (const auto& f : finals) {
      if (f.scope != scope) continue;
      before.push_back(f.initial_numeric);
      after.push_back(f.final_numeric);
      initial_map[f.publisher] = f.initial_numeric;
      final_map[f.publisher] = f.final_numeric;
    }
    if (before.empty()) continue;
    ScopeEqualization s;
    s.scope = scope;
    s.before = concentration(before);
    s.after = concentration(after);
    s.delta = s.before.gini - s.after.gini;
    s.change = change_stats(initial_map, final_map, scope);
    report.scopes.push_back(std::move(s));
    all_before.insert(all_before.end(), before.begin(), before.end());
    all_after.insert(all_after.end(), after.begin(), after.end());
  }
  report.before = concentration(all_before);
  report.after = concentration(all_after);
  report.delta = report.before.gini - report.after.gini;
  return report;
}

}  // namespace pubcat
