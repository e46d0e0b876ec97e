// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "gateway_fixtures.hpp"
#include "pubcat/analytics.hpp"

namespace pubcat {
namespace {

using namespace testing;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v, int decimals = 2) { return csv::format_fixed(v, decimals); }

template <typename Fn>
void criterion(const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(false, name, std::string("threw: ") + e.what());
  }
}

void quartile_reproduction() {
  const RankedList list = import_ranking(archaeology_domestic_rows(), Field::named("Archaeology and Prehistory"),
                                         Scope::Domestic);
  const int quartiles[] = {1, 2, 3, 3, 3, 4, 4, 4, 4, 4};
  const double shares[] = {19.06, 37.36, 51.82, 64.05, 70.19, 75.10, 79.10, 82.10, 83.87, 85.47};
  bool exact = true;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    exact = exact && list.entries[i].quartile == quartiles[i];
    worst = std::max(worst, std::abs(list.entries[i].accum_share - shares[i]));
  }
  std::string got;
  for (int i = 0; i < 10; ++i) got += (i ? "," : "") + std::to_string(list.entries[i].quartile);
  report(exact && worst <= 0.15, "quartile reproduction",
         "quartiles (" + got + "), max share deviation " + fmt(worst, 3) + " pp (tolerance 0.15)");
}

void category_mapping() {
  const CategoryMapping expected[] = {{1, 'A', 4}, {2, 'B', 3}, {3, 'C', 2}, {4, 'D', 1}};
  bool ok = true;
  std::string got;
  for (const auto& e : expected) {
    const CategoryMapping m = map_quartile_to_category(e.quartile);
    const CategoryMapping back = category_from_numeric(e.numeric);
    ok = ok && m == e && back == e;
    got += " (" + std::to_string(m.quartile) + "," + m.letter + "," + std::to_string(m.numeric) + ")";
  }
  report(ok, "category mapping", "triples" + got);
}

void sample_sizes() {
  struct Row {
    const char* field;
    int population;
    int expected;
  };
  const Row rows[] = {{"Fine Arts", 27, 26},  {"Arab and Hebrew Studies", 17, 17},
                      {"Philosophy", 73, 62}, {"Geography", 80, 67},
                      {"History", 377, 191},  {"Linguistics, Literature and Philology", 481, 214}};
  int exact = 0;
  std::string detail;
  for (const auto& r : rows) {
    const int n = required_sample_size(r.population);
    if (n == r.expected) ++exact;
    detail += std::string(detail.empty() ? "" : ", ") + std::to_string(r.population) + "->" + std::to_string(n);
  }
  const int archaeology = required_sample_size(57);
  report(exact == 6 && archaeology == 50, "sample sizes",
         std::to_string(exact) + "/6 exact (" + detail + "); Archaeology 57->" + std::to_string(archaeology) +
             " vs reference 45, expected mismatch");
}

void springer_example() {
  Panel panel = history_panel(20);
  panel.open_round(1);
  for (std::size_t i = 0; i < kSpringerRound1.size(); ++i) {
    panel.record_response(response(expert_id(static_cast<int>(i) + 1), 1,
                                   {rescore("Springer", Scope::Foreign, kSpringerRound1[i])}));
  }
  panel.close_round(1);
  const auto agg1 = panel.aggregate_round(1).at({Scope::Foreign, "Springer"});
  panel.open_round(2);
  int displayed = 0;
  for (const auto& q : panel.build_questionnaire(2)) {
    if (q.publisher == "Springer") displayed = q.displayed_numeric;
  }
  for (std::size_t i = 0; i < kSpringerRound2.size(); ++i) {
    panel.record_response(response(expert_id(static_cast<int>(i) + 1), 2,
                                   {rescore("Springer", Scope::Foreign, kSpringerRound2[i])}));
  }
  panel.close_round(2);
  const auto agg2 = panel.aggregate_round(2).at({Scope::Foreign, "Springer"});
  panel.finalize();
  const FinalCategory* springer = nullptr;
  for (const auto& f : panel.finals()) {
    if (f.publisher == "Springer") springer = &f;
  }
  const bool engine = springer && springer->initial_numeric == 2 && std::abs(agg1.mean_score() - 2.6923) <= 1e-4 &&
                      agg2.mean_score() == 3.0 && displayed == 3 && springer->final_numeric == 3 &&
                      springer->final_letter == 'B';
  const int variant_a = round_to_category_numeric(2.865);
  const int variant_b = round_to_category_numeric(2.875);
  const int variant_c = round_to_category_numeric((2.73 + 3.0) / 2);
  report(engine && variant_a == 3 && variant_b == 3 && variant_c == 3, "springer worked example",
         "round-1 mean " + fmt(agg1.mean_score(), 4) + ", round-2 mean " + fmt(agg2.mean_score(), 4) +
             ", final " + (springer ? std::to_string(springer->final_numeric) + std::string(1, springer->final_letter)
                                    : std::string("missing")) +
             "; variants 2.865->" + std::to_string(variant_a) + ", 2.875->" + std::to_string(variant_b));
}

struct FieldRun {
  std::string name;
  int population;
  std::optional<int> sample_size;  // when the drawn size differs from the formula
  int supplement;                  // extension experts
  int answers_main;
  int answers_supplement;
  int answers_round2;
};

json answer_body() {
  return json{{"items", json::array({item("Publisher A", "foreign", true, false)})}};
}

void response_rates_criterion() {
  TempDir dir;
  FileStore store(dir.path());
  Service svc(store, {}, fixed_clock());
  const std::vector<FieldRun> fields = {
      {"Archaeology and Prehistory", 57, 45, 0, 16, 0, 16},
      {"Fine Arts", 27, std::nullopt, 0, 6, 0, 6},
      {"Arab and Hebrew Studies", 17, std::nullopt, 0, 4, 0, 4},
      {"Philosophy", 73, std::nullopt, 29, 14, 6, 18},
      {"Geography", 80, std::nullopt, 13, 8, 5, 12},
      {"History", 377, std::nullopt, 0, 97, 0, 81},
      {"Linguistics, Literature and Philology", 481, std::nullopt, 0, 145, 0, 117},
  };
  const std::string ranking = "publisher,icee\nPublisher A,2.0\nPublisher B,1.0\nPublisher C,0.5\n";
  int k = 0;
  for (const auto& f : fields) {
    const std::string prefix = "f" + std::to_string(++k) + "x";
    svc.import_ranking(f.name, Scope::Foreign, ranking);
    svc.import_roster(roster_csv(f.name, f.population, prefix));
    const std::string id = Field::named(f.name).id;
    const PanelSummary s = svc.create_panel({f.name, 2015, std::nullopt, id, f.sample_size});
    std::vector<std::string> added;
    if (f.supplement > 0) {
      const Roster extra = parse_roster_csv(roster_csv(f.name, f.supplement, prefix + "s"));
      for (const auto& e : svc.extend_panel({id, f.supplement, 2016, extra})) added.push_back(e.expert_id);
    }
    svc.open_round(id, 1);
    std::vector<std::string> respondents;
    for (int i = 0; i < f.answers_main; ++i) respondents.push_back(s.sample[i].expert_id);
    for (int i = 0; i < f.answers_supplement; ++i) respondents.push_back(added[i]);
    for (const auto& e : respondents) svc.submit(svc.issue_token(id, e).token, answer_body());
    svc.close_round(id, 1);
    svc.open_round(id, 2);
    for (int i = 0; i < f.answers_round2; ++i) svc.submit(svc.issue_token(id, respondents[i]).token, answer_body());
    svc.close_round(id, 2);
  }

  const auto rows = svc.response_rate_table();
  auto rate = [&](const std::string& field, int round) {
    for (const auto& r : rows) {
      if (r.field.name == field && r.round == round) return r.rate_percent;
    }
    return -1.0;
  };
  struct Check {
    std::string field;
    int round;
    double expected;
  };
  const std::vector<Check> checks = {
      {"History", 1, 50.79},     {"History", 2, 83.51},
      {"Linguistics, Literature and Philology", 1, 67.76},
      {"Linguistics, Literature and Philology", 2, 80.69},
      {"Philosophy", 1, 21.98},  {"Philosophy", 2, 90.0},
      {"Geography", 1, 16.25},   {"Geography", 2, 92.3},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : checks) {
    const double got = rate(c.field, c.round);
    ok = ok && std::abs(got - c.expected) <= 0.05;
    if (c.round == 1) detail += (detail.empty() ? "" : ", ") + c.field.substr(0, c.field.find(',')) + " ";
    detail += fmt(got) + (c.round == 1 ? "/" : "");
  }
  const double total2 = rate("TOTAL", 2);
  int answers2 = 0, base2 = 0;
  for (const auto& r : rows) {
    if (r.field.name == "TOTAL" && r.round == 2) {
      answers2 = r.answers;
      base2 = r.sample_n;
    }
  }
  ok = ok && std::abs(total2 - 84.39) <= 0.005 && answers2 == 254 && base2 == 301;
  report(ok, "response rates",
         detail + "; TOTAL round 2 " + fmt(total2) + " (" + std::to_string(answers2) + "/" + std::to_string(base2) +
             "), reference 92.36 not reproducible; TOTAL round 1 " + fmt(rate("TOTAL", 1)));
}

double gini_oracle(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double diff = 0.0;
  for (double a : x) {
    for (double b : x) diff += std::abs(a - b);
  }
  return diff / (2.0 * n * n * mean);
}

void gini_oracle_criterion() {
  std::mt19937_64 rng(20160501);
  std::uniform_int_distribution<int> length(1, 50);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::uniform_real_distribution<double> scale(0.01, 1000.0);
  double worst = 0.0, worst_invariance = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(static_cast<std::size_t>(length(rng)));
    for (auto& v : x) v = t % 5 == 0 ? std::floor(value(rng) / 2.5) + 1 : value(rng);
    x[0] += 0.5;  // at least one positive value
    const double g = gini(x);
    worst = std::max(worst, std::abs(g - gini_oracle(x)));
    std::vector<double> scaled = x;
    const double c = scale(rng);
    for (auto& v : scaled) v *= c;
    std::vector<double> shuffled = x;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    worst_invariance = std::max({worst_invariance, std::abs(gini(scaled) - g), std::abs(gini(shuffled) - g)});
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "200 vectors, max |formula - oracle| %.2e, max scale/permutation drift %.2e",
                worst, worst_invariance);
  report(worst <= 1e-9 && worst_invariance <= 1e-9, "gini oracle equivalence", buf);
}

struct SimOutcome {
  double gini_before;
  double gini_after;
  double mean_shift;
};

int clamp_score(double v) { return static_cast<int>(std::clamp(std::lround(v), 1L, 4L)); }

/// One simulated consultation: skewed ICEE lists, experts who know a random
/// subset of publishers and rescore with noise around the displayed value,
/// and second-round opinions pulled halfway back toward the new display.
SimOutcome simulate(std::uint64_t seed, double bias) {
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> icee(0.0, 1.2);
  const Field field = Field::named("Simulated");
  auto rows = [&](char tag) {
    std::vector<ScoreRow> out;
    for (int i = 0; i < 25; ++i) {
      out.push_back({std::string(1, tag) + std::to_string(i), std::round(icee(rng) * 1000.0) / 1000.0 + 0.001});
    }
    return out;
  };
  Panel panel("sim", field, import_ranking(rows('d'), field, Scope::Domestic),
              import_ranking(rows('f'), field, Scope::Foreign), expert_ids(25));

  std::bernoulli_distribution answers_round1(0.6), answers_round2(0.85), knows(0.4);
  std::normal_distribution<double> noise(bias, 0.6), noise2(bias / 2, 0.3);
  std::map<std::string, std::map<PublisherKey, int>> opinions;

  panel.open_round(1);
  const auto items1 = panel.build_questionnaire(1);
  for (const auto& expert : panel.experts()) {
    if (!answers_round1(rng)) continue;
    ExpertResponse r{expert, 1, {}, {}, 0};
    for (const auto& q : items1) {
      if (!knows(rng)) continue;
      const int o = clamp_score(q.displayed_numeric + noise(rng));
      opinions[expert][{q.scope, q.publisher}] = o;
      const bool disagree = o != q.displayed_numeric;
      r.items.push_back({q.publisher, q.scope, true, disagree, disagree ? std::optional<int>(o) : std::nullopt});
    }
    panel.record_response(std::move(r));
  }
  panel.close_round(1);
  panel.open_round(2);
  const auto items2 = panel.build_questionnaire(2);
  for (const auto& [expert, known] : opinions) {
    if (!answers_round2(rng)) continue;
    ExpertResponse r{expert, 2, {}, {}, 0};
    for (const auto& q : items2) {
      const auto it = known.find({q.scope, q.publisher});
      if (it == known.end()) continue;
      const double pulled = q.displayed_numeric + 0.5 * (it->second - q.displayed_numeric);
      const int o = clamp_score(pulled + noise2(rng));
      const bool disagree = o != q.displayed_numeric;
      r.items.push_back({q.publisher, q.scope, true, disagree, disagree ? std::optional<int>(o) : std::nullopt});
    }
    panel.record_response(std::move(r));
  }
  panel.close_round(2);
  panel.finalize();

  const EqualizationReport rep = equalization_report(panel);
  double shift = 0.0;
  for (const auto& f : panel.finals()) shift += f.final_numeric - f.initial_numeric;
  return {rep.before.gini, rep.after.gini, shift / static_cast<double>(panel.finals().size())};
}

void equalization_criterion() {
  constexpr int kRuns = 1000;
  int reduced = 0;
  double neutral_shift = 0.0, biased_shift = 0.0, mean_delta = 0.0;
  int biased_positive = 0;
  for (int run = 0; run < kRuns; ++run) {
    const SimOutcome neutral = simulate(1000 + run, 0.0);
    if (neutral.gini_after <= neutral.gini_before) ++reduced;
    mean_delta += (neutral.gini_before - neutral.gini_after) / kRuns;
    neutral_shift += neutral.mean_shift / kRuns;
    const SimOutcome biased = simulate(500000 + run, 0.4);
    biased_shift += biased.mean_shift / kRuns;
    if (biased.mean_shift > 0) ++biased_positive;
  }
  const double share = 100.0 * reduced / kRuns;
  report(share >= 95.0 && biased_shift > 0 && biased_positive >= 950 && biased_shift > neutral_shift,
         "equalizing effect",
         "gini_after <= gini_before in " + fmt(share, 1) + "% of " + std::to_string(kRuns) + " runs (mean drop " +
             fmt(mean_delta, 4) + "); upward-biased mean shift +" + fmt(biased_shift, 3) + " (positive in " +
             std::to_string(biased_positive) + " runs) vs unbiased " + fmt(neutral_shift, 3));
}

/// Drives a History panel through the API; returns the finals CSV.
std::string scripted_session(Service& svc) {
  seed_history(svc, 40);
  const PanelSummary s = svc.create_panel({"History", 3, std::nullopt, "history", std::nullopt});
  auto post = [&](const std::string& path, const std::string& body = {}) {
    const ApiResponse r = call(svc, "POST", path, body);
    if (r.status != 200) throw std::runtime_error(path + " -> " + r.body);
  };
  post("/api/panels/history/rounds/1/open");
  for (std::size_t i = 0; i < kSpringerRound1.size(); ++i) {
    json items = json::array({item("Springer", "foreign", true, true, kSpringerRound1[i])});
    if (i % 3 == 0) items.push_back(item("Csic", "domestic", true, true, 1 + static_cast<int>(i) % 4));
    if (i % 4 == 1) items.push_back(item("Brill", "foreign", true, false));
    post("/api/q/" + svc.issue_token("history", s.sample[i].expert_id).token, json{{"items", items}}.dump());
  }
  post("/api/panels/history/rounds/1/close");
  post("/api/panels/history/rounds/2/open");
  for (std::size_t i = 0; i < kSpringerRound2.size(); ++i) {
    json items = json::array({item("Springer", "foreign", true, true, kSpringerRound2[i])});
    if (i % 2 == 0) items.push_back(item("Ariel (Grupo Planeta)", "domestic", true, true, 2));
    post("/api/q/" + svc.issue_token("history", s.sample[i].expert_id).token, json{{"items", items}}.dump());
  }
  post("/api/panels/history/rounds/2/close");
  post("/api/panels/history/finalize");
  return call(svc, "GET", "/api/panels/history/final", "", {{"format", "csv"}}).body;
}

void determinism_criterion() {
  TempDir first_dir;
  FileStore first(first_dir.path());
  Service svc(first, {}, fixed_clock());
  const std::string original = scripted_session(svc);
  const PanelRecord recorded = first.load_panel("history");

  // Replay the recorded log through the API of a fresh store.
  TempDir second_dir;
  FileStore second(second_dir.path());
  Service replay(second, {}, fixed_clock());
  seed_history(replay, 40);
  replay.create_panel({"History", 3, std::nullopt, "history", std::nullopt});
  for (const auto& command : recorded.log) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, OpenRound>) {
            call(replay, "POST", "/api/panels/history/rounds/" + std::to_string(c.round) + "/open");
          } else if constexpr (std::is_same_v<T, CloseRound>) {
            call(replay, "POST", "/api/panels/history/rounds/" + std::to_string(c.round) + "/close");
          } else if constexpr (std::is_same_v<T, SubmitResponse>) {
            json body{{"items", c.response.items}, {"suggested_publishers", c.response.suggested_publishers}};
            call(replay, "POST", "/api/q/" + replay.issue_token("history", c.response.expert_id).token, body.dump());
          } else if constexpr (std::is_same_v<T, FinalizePanel>) {
            call(replay, "POST", "/api/panels/history/finalize");
          }
        },
        command);
  }
  const std::string replayed = call(replay, "GET", "/api/panels/history/final", "", {{"format", "csv"}}).body;
  const std::string folded = export_finals_csv(recorded.replay().finals());
  const bool identical = !original.empty() && original == replayed && original == folded &&
                         second.load_panel("history") == recorded;

  // Persist/load equality for every fixture panel at every stage.
  TempDir third_dir;
  FileStore third(third_dir.path());
  int checked = 0, equal = 0;
  auto round_trip = [&](const PanelRecord& r) {
    third.save_panel(r);
    ++checked;
    if (third.load_panel(r.current.id()) == r) ++equal;
  };
  auto record_of = [](Panel p) {
    return PanelRecord{p.data(), SamplingParams{}, static_cast<int>(p.experts().size()), {}, {}, p};
  };
  const Field archaeology = Field::named("Archaeology and Prehistory");
  std::vector<PanelRecord> fixtures = {
      record_of(history_panel(40)),
      record_of(Panel("archaeology", archaeology,
                      import_ranking(archaeology_domestic_rows(), archaeology, Scope::Domestic),
                      import_ranking(archaeology_foreign_rows(), archaeology, Scope::Foreign), expert_ids(45))),
  };
  for (auto& r : fixtures) {
    round_trip(r);
    const bool is_history = r.current.id() == "history";
    for (const auto& c : recorded.log) {
      if (!is_history) {
        if (std::holds_alternative<SubmitResponse>(c)) continue;
      }
      r.apply(c);
      round_trip(r);
    }
  }
  report(identical && equal == checked, "determinism",
         std::string("replayed finals CSV ") + (original == replayed && original == folded ? "byte-identical" : "DIFFERS") +
             " (" + std::to_string(original.size()) + " bytes, " + std::to_string(recorded.log.size()) +
             " commands); persist/load equal for " + std::to_string(equal) + "/" + std::to_string(checked) +
             " fixture states");
}

}  // namespace
}  // namespace pubcat

int main() {
  using namespace pubcat;
  criterion("quartile reproduction", quartile_reproduction);
  criterion("category mapping", category_mapping);
  criterion("sample sizes", sample_sizes);
  criterion("springer worked example", springer_example);
  criterion("response rates", response_rates_criterion);
  criterion("gini oracle equivalence", gini_oracle_criterion);
  criterion("equalizing effect", equalization_criterion);
  criterion("determinism", determinism_criterion);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
