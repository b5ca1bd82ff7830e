#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "phishpond/game.hpp"
#include "phishpond/study.hpp"

namespace phishpond {

// Session logs under <root>/sessions/<id>.jsonl: a header record (config,
// seed, plan) followed by one record per action. Logs only ever grow.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  // Appends the events not yet on disk. Throws CorruptLog if the stored log
  // is longer than the state's or belongs to a different plan.
  void persist(std::string_view session_id, const GameState& state) const;
  // Rebuilds the state by replaying every logged action and checking each
  // recorded result. Throws UnknownSession or CorruptLog.
  GameState load(std::string_view session_id) const;
  bool exists(std::string_view session_id) const;

  std::filesystem::path path_for(std::string_view session_id) const;

 private:
  std::filesystem::path dir_;
};

// Renders one event as its log record.
std::string event_to_json_line(std::string_view session_id, const GameEvent& event);

struct Study {
  std::string id;
  TestKey pretest;
  TestKey posttest;
  std::string created_at;
  std::vector<StudyRecord> records;
};

// One directory per study: study.json (keys) and records.jsonl (completed
// participants, append-only).
class StudyStore {
 public:
  explicit StudyStore(std::filesystem::path root);

  void create(std::string_view study_id, const TestKey& pretest, const TestKey& posttest,
              std::string_view created_at) const;
  // Throws DuplicateId if the participant already has a record.
  void append_record(std::string_view study_id, const StudyRecord& record) const;
  Study load(std::string_view study_id) const;
  bool exists(std::string_view study_id) const;

  std::filesystem::path dir_for(std::string_view study_id) const;

 private:
  std::filesystem::path root_;
  mutable std::mutex write_mutex_;
};

// Reads a study directory directly. Throws NotFound, ParseError or DuplicateId.
Study load_study_dir(const std::filesystem::path& dir);

}  // namespace phishpond
