#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "gateway_fixtures.hpp"

namespace pubcat {
namespace {

using namespace testing;

PanelRecord fresh_record(const std::string& id = "history", int experts = 20) {
  Panel p = history_panel(experts);
  PanelData data = p.data();
  data.id = id;
  Panel panel = Panel::restore(data);
  std::vector<SampledExpert> sample;
  for (const auto& e : panel.experts()) sample.push_back({e, "History", 5});
  return PanelRecord{panel.data(), SamplingParams{}, 40, sample, {}, panel};
}

std::vector<PanelCommand> springer_script() {
  std::vector<PanelCommand> script{OpenRound{1}};
  for (std::size_t i = 0; i < kSpringerRound1.size(); ++i) {
    script.push_back(SubmitResponse{response(expert_id(static_cast<int>(i) + 1), 1,
                                             {rescore("Springer", Scope::Foreign, kSpringerRound1[i])})});
  }
  script.push_back(CloseRound{1});
  script.push_back(OpenRound{2});
  for (std::size_t i = 0; i < kSpringerRound2.size(); ++i) {
    script.push_back(SubmitResponse{response(expert_id(static_cast<int>(i) + 1), 2,
                                             {rescore("Springer", Scope::Foreign, kSpringerRound2[i])})});
  }
  script.push_back(CloseRound{2});
  script.push_back(FinalizePanel{});
  return script;
}

TEST(StoreTest, RecordRoundTripsAtEveryStage) {
  TempDir dir;
  FileStore store(dir.path());
  PanelRecord record = fresh_record();
  store.create_panel(record);
  EXPECT_EQ(store.load_panel("history"), record);
  for (const auto& command : springer_script()) {
    record.apply(command);
    store.save_panel(record);
    const PanelRecord loaded = store.load_panel("history");
    EXPECT_EQ(loaded, record);
    EXPECT_EQ(loaded.current.state(), record.current.state());
  }
  EXPECT_EQ(store.load_panel("history").current.finals(), record.current.finals());
}

TEST(StoreTest, ReopenedStoreSeesSameRecords) {
  TempDir dir;
  PanelRecord record = fresh_record();
  {
    FileStore store(dir.path());
    store.create_panel(record);
    store.update_panel("history", [](PanelRecord& r) { r.apply(OpenRound{1}); });
    record.apply(OpenRound{1});
  }
  FileStore again(dir.path());
  EXPECT_EQ(again.load_panel("history"), record);
  EXPECT_EQ(again.panel_ids(), std::vector<std::string>{"history"});
}

TEST(StoreTest, TruncatedFileIsCorrupt) {
  TempDir dir;
  FileStore store(dir.path());
  PanelRecord record = fresh_record();
  for (const auto& c : springer_script()) record.apply(c);
  store.create_panel(record);
  const auto path = dir.path() / "panels" / "history.json";
  const std::string full = read_file(path);
  for (std::size_t keep : {std::size_t{0}, std::size_t{1}, full.size() / 3, full.size() / 2, full.size() - 2}) {
    std::ofstream(path, std::ios::trunc | std::ios::binary) << full.substr(0, keep);
    EXPECT_EQ(code_of([&] { store.load_panel("history"); }), ErrorCode::CorruptRecord) << keep;
  }
}

TEST(StoreTest, StateThatDisagreesWithLogIsCorrupt) {
  TempDir dir;
  FileStore store(dir.path());
  PanelRecord record = fresh_record();
  for (const auto& c : springer_script()) record.apply(c);
  store.create_panel(record);
  const auto path = dir.path() / "panels" / "history.json";
  const json original = json::parse(read_file(path));

  json dropped = original;
  dropped["log"].erase(dropped["log"].size() - 1);
  write_file_atomic(path, dropped.dump());
  EXPECT_EQ(code_of([&] { store.load_panel("history"); }), ErrorCode::CorruptRecord);

  json edited = original;
  edited["current"]["finals"][0]["final_numeric"] = 1;
  edited["current"]["finals"][0]["final_letter"] = "D";
  write_file_atomic(path, edited.dump());
  EXPECT_EQ(code_of([&] { store.load_panel("history"); }), ErrorCode::CorruptRecord);

  json bad_command = original;
  bad_command["log"][0] = json{{"type", "launch"}};
  write_file_atomic(path, bad_command.dump());
  EXPECT_EQ(code_of([&] { store.load_panel("history"); }), ErrorCode::CorruptRecord);

  json illegal = original;
  illegal["log"].insert(illegal["log"].begin(), json{{"type", "finalize"}});
  write_file_atomic(path, illegal.dump());
  EXPECT_EQ(code_of([&] { store.load_panel("history"); }), ErrorCode::CorruptRecord);

  write_file_atomic(path, original.dump());
  EXPECT_EQ(store.load_panel("history"), record);
}

TEST(StoreTest, UnknownAndInvalidPanelIds) {
  TempDir dir;
  FileStore store(dir.path());
  EXPECT_EQ(code_of([&] { store.load_panel("nope"); }), ErrorCode::UnknownPanel);
  EXPECT_EQ(code_of([&] { store.load_panel("../roster"); }), ErrorCode::UnknownPanel);
  EXPECT_EQ(code_of([&] { store.load_panel(""); }), ErrorCode::UnknownPanel);
  EXPECT_FALSE(store.has_panel("../roster"));
}

TEST(StoreTest, DuplicatePanelRejected) {
  TempDir dir;
  FileStore store(dir.path());
  store.create_panel(fresh_record());
  EXPECT_EQ(code_of([&] { store.create_panel(fresh_record()); }), ErrorCode::DuplicatePanel);
}

TEST(StoreTest, FailedUpdateLeavesRecordUntouched) {
  TempDir dir;
  FileStore store(dir.path());
  const PanelRecord record = fresh_record();
  store.create_panel(record);
  EXPECT_EQ(code_of([&] {
              store.update_panel("history", [](PanelRecord& r) { r.apply(CloseRound{1}); });
            }),
            ErrorCode::IllegalTransition);
  EXPECT_EQ(store.load_panel("history"), record);
}

TEST(StoreTest, ConcurrentPersistOfTwoPanels) {
  TempDir dir;
  FileStore store(dir.path());
  PanelRecord a = fresh_record("panel-a");
  PanelRecord b = fresh_record("panel-b");
  store.create_panel(a);
  store.create_panel(b);
  const auto script = springer_script();
  auto run = [&](const std::string& id) {
    for (const auto& c : script) store.update_panel(id, [&](PanelRecord& r) { r.apply(c); });
  };
  std::thread ta(run, "panel-a");
  std::thread tb(run, "panel-b");
  ta.join();
  tb.join();
  for (const auto& c : script) {
    a.apply(c);
    b.apply(c);
  }
  EXPECT_EQ(store.load_panel("panel-a"), a);
  EXPECT_EQ(store.load_panel("panel-b"), b);
}

TEST(StoreTest, ConcurrentWritersOfOnePanelAreSerialized) {
  TempDir dir;
  FileStore store(dir.path());
  PanelRecord record = fresh_record("history", 24);
  record.apply(OpenRound{1});
  store.create_panel(record);
  std::vector<std::thread> writers;
  for (int i = 1; i <= 24; ++i) {
    writers.emplace_back([&, i] {
      store.update_panel("history", [&](PanelRecord& r) {
        r.apply(SubmitResponse{response(expert_id(i), 1, {rescore("Springer", Scope::Foreign, 1 + i % 4)})});
      });
    });
  }
  for (auto& t : writers) t.join();
  const PanelRecord loaded = store.load_panel("history");
  EXPECT_EQ(loaded.current.responses(1).size(), 24u);
  EXPECT_EQ(loaded.log.size(), 25u);
  EXPECT_EQ(loaded.replay(), loaded.current);
}

TEST(StoreTest, AtomicWriteReplacesWholeFile) {
  TempDir dir;
  const auto path = dir.path() / "sub" / "file.txt";
  write_file_atomic(path, "first version, rather long");
  write_file_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(path.parent_path())) ++files;
  EXPECT_EQ(files, 1);
  EXPECT_EQ(code_of([&] { read_file(dir.path() / "missing"); }), ErrorCode::StorageUnavailable);
}

TEST(StoreTest, UnwritableRootIsStorageUnavailable) {
  TempDir dir;
  const auto blocker = dir.path() / "file";
  write_file_atomic(blocker, "x");
  EXPECT_EQ(code_of([&] { FileStore store(blocker / "store"); }), ErrorCode::StorageUnavailable);
}

TEST(StoreTest, RankingAndRosterRoundTrip) {
  TempDir dir;
  FileStore store(dir.path());
  const RankedList list = import_ranking(history_foreign_rows(), history(), Scope::Foreign);
  store.save_ranking(list);
  EXPECT_EQ(store.load_ranking("history", Scope::Foreign), list);
  EXPECT_FALSE(store.load_ranking("history", Scope::Domestic).has_value());

  store.merge_roster(Roster{{{"a1", "History", "a@x"}, {"a2", "History", ""}}});
  store.merge_roster(Roster{{{"a2", "History", "new@x"}, {"b1", "Philosophy", ""}}});
  const Roster roster = store.load_roster();
  ASSERT_EQ(roster.subjects.size(), 3u);
  EXPECT_EQ(roster.subjects[1], (Subject{"a2", "History", "new@x"}));
  EXPECT_EQ(code_of([&] { store.merge_roster(Roster{{{"c", "X", ""}, {"c", "X", ""}}}); }),
            ErrorCode::DuplicateExpert);
}

TEST(StoreTest, TokensPersist) {
  TempDir dir;
  FileStore store(dir.path());
  store.update_tokens([](auto& t) { t["abc"] = TokenRecord{"abc", "p", "e", 7}; });
  const auto tokens = FileStore(dir.path()).load_tokens();
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_EQ(tokens.at("abc"), (TokenRecord{"abc", "p", "e", 7}));
}

}  // namespace
}  // namespace pubcat
