#pragma once

// Shared test data: small History panel with the Springer example, the
// Archaeology domestic ranking, and helpers to drive a panel.

#include <cstdio>
#include <string>
#include <vector>

#include "pubcat/delphi.hpp"
#include "pubcat/error.hpp"
#include "pubcat/ranking.hpp"

namespace pubcat::testing {

inline constexpr ErrorCode kNoError = static_cast<ErrorCode>(-1);

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return kNoError;
}

inline std::string expert_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "h%03d", i);
  return buf;
}

inline std::vector<std::string> expert_ids(int n, int first = 1) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(expert_id(first + i));
  return out;
}

inline Field history() { return Field::named("History"); }

/// Springer sits at 62% cumulative share: third quartile, category C (2).
inline std::vector<ScoreRow> history_foreign_rows() {
  return {{"Cambridge University Press", 2.4}, {"Oxford University Press", 2.0},
          {"Springer", 1.8},                   {"Brill", 1.5},
          {"Routledge", 1.3},                  {"Elsevier", 1.0}};
}

inline std::vector<ScoreRow> history_domestic_rows() {
  return {{"Ariel (Grupo Planeta)", 2.452}, {"Crítica (Grupo Planeta)", 2.354},
          {"Akal (Akal)", 1.860},           {"Csic", 1.573},
          {"Síntesis", 0.515},              {"Brill", 0.3}};
}

inline Panel history_panel(int experts = 20) {
  return Panel("history", history(),
               import_ranking(history_domestic_rows(), history(), Scope::Domestic),
               import_ranking(history_foreign_rows(), history(), Scope::Foreign),
               expert_ids(experts));
}

inline ResponseItem rescore(std::string publisher, Scope scope, int score) {
  return ResponseItem{std::move(publisher), scope, true, true, score};
}

inline ExpertResponse response(std::string expert, int round, std::vector<ResponseItem> items) {
  return ExpertResponse{std::move(expert), round, std::move(items), {}, 1'450'000'000};
}

inline const std::vector<int> kSpringerRound1 = {4, 3, 2, 2, 2, 2, 2, 2, 3, 4, 3, 3, 3};
inline const std::vector<int> kSpringerRound2 = {4, 4, 3, 3, 3, 3, 3, 2, 2};

/// Archaeology and Prehistory, domestic list: the fifteen printed rows
/// followed by an unpublished tail. The tail is synthetic; its total (1.102)
/// is chosen so that the list sums to 12.863, the total the printed
/// cumulative percentages imply (2.452 / 0.1906, 10.994 / 0.8547, ...).
inline std::vector<ScoreRow> archaeology_domestic_rows() {
  std::vector<ScoreRow> rows = {
      {"Ariel (Grupo Planeta)", 2.452},
      {"Crítica (Grupo Planeta)", 2.354},
      {"Akal (Akal)", 1.860},
      {"Csic", 1.573},
      {"Cátedra (Grupo Anaya, Hachette Livre)", 0.789},
      {"Ediciones Bellaterra", 0.632},
      {"Síntesis", 0.515},
      {"Alianza (Grupo Anaya, Hachette Livre)", 0.385},
      {"Aranzadi (Thomson Reuters)", 0.228},
      {"Siglo XXI De España (Akal)", 0.206},
      {"Gredos (Grupo Rba)", 0.165},
      {"Universidad De Granada", 0.161},
      {"Universidad Complutense De Madrid", 0.147},
      {"Casa De Velazquez", 0.147},
      {"Universitat De Barcelona", 0.147},
  };
  const double tail[] = {0.140, 0.132, 0.125, 0.118, 0.111, 0.105, 0.100, 0.095, 0.090, 0.086};
  for (std::size_t i = 0; i < std::size(tail); ++i) {
    rows.push_back({"Tail publisher " + std::to_string(i + 1), tail[i]});
  }
  return rows;
}

inline std::vector<ScoreRow> archaeology_foreign_rows() {
  return {{"Cambridge University Press", 3.838}, {"Oxford University Press", 2.117},
          {"Routledge (Francis & Taylor Group)", 1.402}, {"Archaeopress", 1.276},
          {"Cnrs", 1.181}, {"Elsevier", 1.046}, {"Springer", 0.714}, {"Oxbow Books", 0.624},
          {"Blackwell", 0.597}, {"L'Erma Di Bretschneider", 0.446}, {"Brepols", 0.382},
          {"Academic Press (Elsevier)", 0.375}, {"Brill", 0.281},
          {"Chicago University Press", 0.228}, {"Ecole Française De Rome", 0.224}};
}

}  // namespace pubcat::testing
