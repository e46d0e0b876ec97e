#include "pubcat/ranking.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "pubcat/csv.hpp"
#include "pubcat/error.hpp"

namespace pubcat {

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Shares within this distance of a multiple of 25 count as sitting on it.
constexpr double kBoundarySlack = 1e-9;

}  // namespace

Field Field::named(std::string_view name) {
  std::string id;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      id.push_back(static_cast<char>(std::tolower(u)));
    } else if (!id.empty() && id.back() != '-') {
      id.push_back('-');
    }
  }
  while (!id.empty() && id.back() == '-') id.pop_back();
  return Field{id, std::string(name)};
}

std::string_view scope_name(Scope scope) noexcept {
  return scope == Scope::Domestic ? "domestic" : "foreign";
}

Scope parse_scope(std::string_view text) {
  const std::string lower = ascii_lower(text);
  if (lower == "domestic") return Scope::Domestic;
  if (lower == "foreign") return Scope::Foreign;
  throw Error(ErrorCode::Malformed, "scope must be 'domestic' or 'foreign', got '" +
                                        std::string(text) + "'");
}

CategoryMapping map_quartile_to_category(int quartile) {
  static constexpr CategoryMapping kTable[] = {
      {1, 'A', 4}, {2, 'B', 3}, {3, 'C', 2}, {4, 'D', 1}};
  if (quartile < 1 || quartile > 4) {
    throw Error(ErrorCode::OutOfRange, "quartile must be in 1..4, got " + std::to_string(quartile));
  }
  return kTable[quartile - 1];
}

CategoryMapping category_from_numeric(int numeric) {
  if (numeric < 1 || numeric > 4) {
    throw Error(ErrorCode::OutOfRange,
                "category numeric must be in 1..4, got " + std::to_string(numeric));
  }
  return map_quartile_to_category(5 - numeric);
}

int quartile_for_share(double accum_share_percent) {
  if (!(accum_share_percent > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "accumulated share must be positive");
  }
  const double q = std::ceil(accum_share_percent / 25.0 - kBoundarySlack);
  return static_cast<int>(std::clamp(q, 1.0, 4.0));
}

int round_to_category_numeric(double x) {
  if (!(x >= 1.0 && x <= 4.0)) {
    throw Error(ErrorCode::OutOfRange, "category mean must lie in [1, 4]");
  }
  return static_cast<int>(std::floor(x + 0.5));
}

const RankedEntry* RankedList::find(std::string_view publisher) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const RankedEntry& e) { return e.publisher == publisher; });
  return it == entries.end() ? nullptr : &*it;
}

void assign_cumulative_quartiles(std::span<RankedEntry> entries) {
  double total = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].icee > entries[i - 1].icee) {
      throw Error(ErrorCode::Unsorted, "entries must be sorted by non-increasing ICEE ('" +
                                           entries[i].publisher + "' out of order)");
    }
    total += entries[i].icee;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroTotal, "sum of ICEE scores is zero");

  // Same summation order as `total`, so the last share is exactly 100.
  double running = 0.0;
  for (auto& e : entries) {
    running += e.icee;
    e.accum_share = 100.0 * (running / total);
    e.quartile = quartile_for_share(e.accum_share);
    e.category = map_quartile_to_category(e.quartile);
  }
}

RankedList import_ranking(std::span<const ScoreRow> rows, const Field& field, Scope scope) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "ranking has no rows");

  std::set<std::string> seen;
  RankedList list{field, scope, {}, {}};
  list.entries.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.publisher.empty()) throw Error(ErrorCode::Malformed, "publisher name is empty");
    if (!seen.insert(ascii_lower(row.publisher)).second) {
      throw Error(ErrorCode::DuplicatePublisher, "duplicate publisher: " + row.publisher);
    }
    if (!(row.icee >= 0.0) || !std::isfinite(row.icee)) {
      throw Error(ErrorCode::NegativeScore, "ICEE must be non-negative: " + row.publisher);
    }
    list.entries.push_back(RankedEntry{row.publisher, row.icee, 0, 0.0, 0, {}});
  }

  std::sort(list.entries.begin(), list.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.icee != b.icee) return a.icee > b.icee;
              return a.publisher < b.publisher;
            });

  int position = 0;
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    if (i == 0 || list.entries[i].icee != list.entries[i - 1].icee) ++position;
    list.entries[i].position = position;
  }

  assign_cumulative_quartiles(list.entries);

  if (list.entries.size() == 1) {
    list.warnings.push_back("single publisher '" + list.entries.front().publisher +
                            "' holds 100% of the mass and falls in quartile 4");
  }
  return list;
}

std::vector<ScoreRow> parse_ranking_csv(std::string_view text) {
  std::vector<ScoreRow> out;
  for (auto& row : csv::parse_with_header(text, {"publisher", "icee"})) {
    std::string name = row[0];
    const auto first = name.find_first_not_of(" \t");
    const auto last = name.find_last_not_of(" \t");
    name = first == std::string::npos ? "" : name.substr(first, last - first + 1);
    out.push_back(ScoreRow{std::move(name), csv::parse_number(row[1])});
  }
  return out;
}

std::string export_ranking_csv(const RankedList& list) {
  std::string out =
      "publisher,position,icee,accum_share,quartile,category_letter,category_numeric\n";
  for (const auto& e : list.entries) {
    out += csv::join({e.publisher, std::to_string(e.position), csv::format_number(e.icee),
                      csv::format_fixed(e.accum_share, 2), std::to_string(e.quartile),
                      std::string(1, e.category.letter), std::to_string(e.category.numeric)});
    out += '\n';
  }
  return out;
}

}  // namespace pubcat
