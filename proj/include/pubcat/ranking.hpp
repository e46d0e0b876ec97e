#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pubcat {

/// A subject area with its own ranking and its own expert panel.
struct Field {
  std::string id;
  std::string name;

  /// Builds a field whose id is the lower-case ASCII slug of `name`
  /// ("Archaeology and Prehistory" -> "archaeology-and-prehistory").
  static Field named(std::string_view name);

  bool operator==(const Field&) const = default;
};

enum class Scope { Domestic, Foreign };

inline constexpr Scope kScopes[] = {Scope::Domestic, Scope::Foreign};

std::string_view scope_name(Scope scope) noexcept;
/// Accepts "domestic" / "foreign" in any letter case.
Scope parse_scope(std::string_view text);

/// One row of the quartile/letter/numeric correspondence.
struct CategoryMapping {
  int quartile = 4;
  char letter = 'D';
  int numeric = 1;

  bool operator==(const CategoryMapping&) const = default;
};

/// Quartile 1..4 to (A,4) (B,3) (C,2) (D,1). Throws OutOfRange otherwise.
CategoryMapping map_quartile_to_category(int quartile);

/// Inverse of the numeric column: 4 -> A/Q1 ... 1 -> D/Q4.
CategoryMapping category_from_numeric(int numeric);

/// Cumulative-share quartile: min(4, ceil(share / 25)), with exact
/// multiples of 25 kept in the lower quartile.
int quartile_for_share(double accum_share_percent);

/// Nearest category numeric for a mean score in [1, 4]; halves round up.
int round_to_category_numeric(double x);

struct ScoreRow {
  std::string publisher;
  double icee = 0.0;
};

struct RankedEntry {
  std::string publisher;
  double icee = 0.0;
  int position = 0;
  double accum_share = 0.0;  // percent, full precision
  int quartile = 0;
  CategoryMapping category;

  bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
  Field field;
  Scope scope = Scope::Domestic;
  std::vector<RankedEntry> entries;
  std::vector<std::string> warnings;

  const RankedEntry* find(std::string_view publisher) const;

  bool operator==(const RankedList&) const = default;
};

/// Sorts by descending ICEE (ties by publisher name, sharing a dense
/// position number) and assigns cumulative quartiles and categories.
/// Throws EmptyInput, DuplicatePublisher (case-insensitive) or NegativeScore.
RankedList import_ranking(std::span<const ScoreRow> rows, const Field& field,
                          Scope scope);

/// Fills accum_share, quartile and category of entries that are already
/// sorted by non-increasing ICEE. Throws Unsorted or ZeroTotal.
void assign_cumulative_quartiles(std::span<RankedEntry> entries);

/// `publisher,icee` with a header line.
std::vector<ScoreRow> parse_ranking_csv(std::string_view text);

/// `publisher,position,icee,accum_share,quartile,category_letter,category_numeric`.
/// Shares are printed with two decimals.
std::string export_ranking_csv(const RankedList& list);

}  // namespace pubcat
