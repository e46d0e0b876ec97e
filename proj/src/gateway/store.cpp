#include "pubcat/gateway/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pubcat/error.hpp"
#include "pubcat/gateway/serialization.hpp"

namespace pubcat {

namespace fs = std::filesystem;

void to_json(json& j, const SampledExpert& s) {
  j = json{{"expert_id", s.expert_id}, {"field", s.field}, {"seed", s.seed}};
}

void from_json(const json& j, SampledExpert& s) {
  j.at("expert_id").get_to(s.expert_id);
  j.at("field").get_to(s.field);
  j.at("seed").get_to(s.seed);
}

void to_json(json& j, const TokenRecord& t) {
  j = json{{"token", t.token}, {"panel_id", t.panel_id}, {"expert_id", t.expert_id},
           {"issued_at", t.issued_at}};
}

void from_json(const json& j, TokenRecord& t) {
  j.at("token").get_to(t.token);
  j.at("panel_id").get_to(t.panel_id);
  j.at("expert_id").get_to(t.expert_id);
  j.at("issued_at").get_to(t.issued_at);
}

namespace {

[[noreturn]] void storage_error(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::StorageUnavailable, what + " '" + path.string() + "': " + std::strerror(errno));
}

bool valid_panel_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  }
  return true;
}

json parse_record(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptRecord, "cannot parse '" + path.string() + "': " + e.what());
  }
}

template <typename T>
T decode(const json& j, const fs::path& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptRecord, "bad record '" + path.string() + "': " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptRecord) throw;
    throw Error(ErrorCode::CorruptRecord, "bad record '" + path.string() + "': " + e.what());
  }
}

json record_to_json(const PanelRecord& r) {
  return json{{"format", 1},        {"created", r.created},   {"params", r.params},
              {"population", r.population}, {"sample", r.sample}, {"log", r.log},
              {"current", r.current.data()}};
}

}  // namespace

void PanelRecord::apply(PanelCommand command) {
  apply_command(current, command);
  log.push_back(std::move(command));
}

Panel PanelRecord::replay() const {
  Panel panel = Panel::restore(created);
  for (const auto& c : log) apply_command(panel, c);
  return panel;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw Error(ErrorCode::StorageUnavailable,
                "cannot create '" + path.parent_path().string() + "': " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid()) + "." +
                       std::to_string(counter.fetch_add(1));

  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) storage_error(tmp, "cannot open");
  const char* data = contents.data();
  std::size_t left = contents.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, data, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      ::unlink(tmp.c_str());
      storage_error(tmp, "cannot write");
    }
    data += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    ::unlink(tmp.c_str());
    storage_error(tmp, "cannot flush");
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    ::unlink(tmp.c_str());
    storage_error(path, "cannot replace");
  }
  const int dir = ::open(path.parent_path().c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dir >= 0) {
    ::fsync(dir);
    ::close(dir);
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) storage_error(path, "cannot read");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FileStore::FileStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "panels", ec);
  if (!ec) fs::create_directories(root_ / "rankings", ec);
  if (ec) {
    throw Error(ErrorCode::StorageUnavailable, "cannot use store '" + root_.string() + "': " + ec.message());
  }
}

void FileStore::save_ranking(const RankedList& list) {
  std::lock_guard lock(meta_mutex_);
  write_file_atomic(root_ / "rankings" / (list.field.id + "." + std::string(scope_name(list.scope)) + ".json"),
                    json(list).dump(1));
}

std::optional<RankedList> FileStore::load_ranking(const std::string& field_id, Scope scope) const {
  const fs::path path = root_ / "rankings" / (field_id + "." + std::string(scope_name(scope)) + ".json");
  if (!fs::exists(path)) return std::nullopt;
  return decode<RankedList>(parse_record(path), path);
}

void FileStore::merge_roster(const Roster& roster) {
  roster.validate();
  std::lock_guard lock(meta_mutex_);
  Roster current;
  const fs::path path = root_ / "roster.json";
  if (fs::exists(path)) current.subjects = decode<std::vector<Subject>>(parse_record(path), path);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < current.subjects.size(); ++i) index[current.subjects[i].expert_id] = i;
  for (const auto& s : roster.subjects) {
    if (auto it = index.find(s.expert_id); it != index.end()) {
      current.subjects[it->second] = s;
    } else {
      index[s.expert_id] = current.subjects.size();
      current.subjects.push_back(s);
    }
  }
  write_file_atomic(path, json(current.subjects).dump(1));
}

Roster FileStore::load_roster() const {
  const fs::path path = root_ / "roster.json";
  Roster roster;
  if (fs::exists(path)) roster.subjects = decode<std::vector<Subject>>(parse_record(path), path);
  return roster;
}

fs::path FileStore::panel_path(const std::string& panel_id) const {
  if (!valid_panel_id(panel_id)) {
    throw Error(ErrorCode::UnknownPanel, "invalid panel id '" + panel_id + "'");
  }
  return root_ / "panels" / (panel_id + ".json");
}

std::mutex& FileStore::panel_mutex(const std::string& panel_id) {
  std::lock_guard lock(locks_mutex_);
  auto& slot = panel_locks_[panel_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

bool FileStore::has_panel(const std::string& panel_id) const {
  return valid_panel_id(panel_id) && fs::exists(panel_path(panel_id));
}

std::vector<std::string> FileStore::panel_ids() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "panels")) {
    const auto name = entry.path().filename().string();
    if (name.ends_with(".json")) ids.push_back(name.substr(0, name.size() - 5));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void FileStore::save_panel(const PanelRecord& record) {
  write_file_atomic(panel_path(record.current.id()), record_to_json(record).dump(1));
}

void FileStore::create_panel(const PanelRecord& record) {
  std::lock_guard lock(panel_mutex(record.current.id()));
  if (fs::exists(panel_path(record.current.id()))) {
    throw Error(ErrorCode::DuplicatePanel, "panel '" + record.current.id() + "' already exists");
  }
  save_panel(record);
}

PanelRecord FileStore::load_panel(const std::string& panel_id) const {
  const fs::path path = panel_path(panel_id);
  if (!fs::exists(path)) throw Error(ErrorCode::UnknownPanel, "no panel '" + panel_id + "'");
  const json j = parse_record(path);
  if (!j.is_object()) throw Error(ErrorCode::CorruptRecord, "bad record '" + path.string() + "'");

  auto created = decode<PanelData>(j.value("created", json()), path);
  auto current_data = decode<PanelData>(j.value("current", json()), path);
  PanelRecord record{std::move(created),
                     decode<SamplingParams>(j.value("params", json()), path),
                     decode<int>(j.value("population", json()), path),
                     decode<std::vector<SampledExpert>>(j.value("sample", json()), path),
                     decode<std::vector<PanelCommand>>(j.value("log", json()), path),
                     Panel::restore(std::move(current_data))};

  Panel replayed = [&] {
    try {
      return record.replay();
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptRecord, "log of panel '" + panel_id + "' does not replay: " + e.what());
    }
  }();
  if (replayed != record.current) {
    throw Error(ErrorCode::CorruptRecord, "panel '" + panel_id + "' state disagrees with its log");
  }
  if (record.current.id() != panel_id) {
    throw Error(ErrorCode::CorruptRecord, "panel file '" + panel_id + "' holds another panel");
  }
  return record;
}

std::map<std::string, TokenRecord> FileStore::load_tokens() const {
  const fs::path path = root_ / "tokens.json";
  std::map<std::string, TokenRecord> out;
  if (!fs::exists(path)) return out;
  for (auto& t : decode<std::vector<TokenRecord>>(parse_record(path), path)) {
    auto key = t.token;
    out.emplace(std::move(key), std::move(t));
  }
  return out;
}

void FileStore::update_tokens(const std::function<void(std::map<std::string, TokenRecord>&)>& fn) {
  std::lock_guard lock(meta_mutex_);
  auto tokens = load_tokens();
  fn(tokens);
  json list = json::array();
  for (const auto& [key, t] : tokens) list.push_back(t);
  write_file_atomic(root_ / "tokens.json", list.dump(1));
}

}  // namespace pubcat
