#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pubcat/delphi.hpp"
#include "pubcat/ranking.hpp"
#include "pubcat/sampling.hpp"

namespace pubcat {

/// How one expert entered a panel sample.
struct SampledExpert {
  std::string expert_id;
  std::string field;
  std::uint64_t seed = 0;

  bool operator==(const SampledExpert&) const = default;
};

/// Durable form of a panel: the draft it was created as, every command
/// applied since, and the resulting state. Loading replays the log and
/// refuses the record if the replay disagrees with the stored state.
struct PanelRecord {
  PanelData created;
  SamplingParams params;
  int population = 0;
  std::vector<SampledExpert> sample;
  std::vector<PanelCommand> log;
  Panel current;

  /// Applies `command` to `current` and appends it to the log.
  void apply(PanelCommand command);
  Panel replay() const;

  bool operator==(const PanelRecord&) const = default;
};

struct TokenRecord {
  std::string token;
  std::string panel_id;
  std::string expert_id;
  std::int64_t issued_at = 0;

  bool operator==(const TokenRecord&) const = default;
};

/// File-backed store rooted at one directory:
///
///   rankings/<field-id>.<scope>.json
///   roster.json
///   panels/<panel-id>.json
///   tokens.json
///
/// Every write goes to a temporary file that is flushed and renamed over
/// the target, so readers and a restarted process see either the old or
/// the new record, never a torn one. Writers of one panel are serialized
/// by a per-panel lock; different panels proceed in parallel.
class FileStore {
 public:
  explicit FileStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  void save_ranking(const RankedList& list);
  std::optional<RankedList> load_ranking(const std::string& field_id, Scope scope) const;

  /// Merges subjects into the stored roster; existing ids are overwritten.
  void merge_roster(const Roster& roster);
  Roster load_roster() const;

  bool has_panel(const std::string& panel_id) const;
  std::vector<std::string> panel_ids() const;
  void save_panel(const PanelRecord& record);
  /// Throws UnknownPanel or CorruptRecord.
  PanelRecord load_panel(const std::string& panel_id) const;

  /// Load, modify and persist one panel under its writer lock. The record
  /// is written only if `fn` returns normally.
  template <typename Fn>
  auto update_panel(const std::string& panel_id, Fn&& fn) {
    std::lock_guard lock(panel_mutex(panel_id));
    PanelRecord record = load_panel(panel_id);
    if constexpr (std::is_void_v<decltype(fn(record))>) {
      fn(record);
      save_panel(record);
    } else {
      auto result = fn(record);
      save_panel(record);
      return result;
    }
  }

  /// Creates a panel record; throws DuplicatePanel if the id is taken.
  void create_panel(const PanelRecord& record);

  std::map<std::string, TokenRecord> load_tokens() const;
  /// Runs `fn` on the token table under the store lock and persists it.
  void update_tokens(const std::function<void(std::map<std::string, TokenRecord>&)>& fn);

 private:
  std::filesystem::path panel_path(const std::string& panel_id) const;
  std::mutex& panel_mutex(const std::string& panel_id);

  std::filesystem::path root_;
  mutable std::mutex meta_mutex_;  // rankings, roster, tokens, lock table
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> panel_locks_;
};

/// Writes `contents` to `path` atomically (temp file, fsync, rename).
/// Throws StorageUnavailable.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Throws StorageUnavailable if the file cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace pubcat
