#include "phishpond/store.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "phishpond/error.hpp"
#include "phishpond/text.hpp"

namespace phishpond {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool is_safe_id(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  return true;
}

void require_safe_id(std::string_view id) {
  if (!is_safe_id(id)) throw Error(Errc::InvalidData, "invalid id '" + std::string(id) + "'");
}

json config_to_json(const GameConfig& c) {
  return {{"lives_start", c.lives_start},     {"time_start", c.time_start},
          {"help_cost", c.help_cost},         {"rounds_total", c.rounds_total},
          {"legit_count", c.legit_count},     {"phish_count", c.phish_count},
          {"points_per_correct", c.points_per_correct},
          {"advance_on_error", c.advance_on_error}};
}

GameConfig config_from_json(const json& j) {
  GameConfig c;
  c.lives_start = j.at("lives_start").get<int>();
  c.time_start = j.at("time_start").get<int>();
  c.help_cost = j.at("help_cost").get<int>();
  c.rounds_total = j.at("rounds_total").get<int>();
  c.legit_count = j.at("legit_count").get<int>();
  c.phish_count = j.at("phish_count").get<int>();
  c.points_per_correct = j.at("points_per_correct").get<int>();
  c.advance_on_error = j.at("advance_on_error").get<bool>();
  return c;
}

json round_to_json(const WormRound& r) {
  return {{"corpus_id", r.corpus_id},
          {"url", r.url},
          {"truth", std::string(to_string(r.truth))},
          {"tip", r.tip ? json(*r.tip) : json(nullptr)},
          {"difficulty", r.difficulty}};
}

WormRound round_from_json(const json& j) {
  WormRound r;
  r.corpus_id = j.at("corpus_id").get<std::string>();
  r.url = j.at("url").get<std::string>();
  r.truth = truth_from_string(j.at("truth").get<std::string>());
  if (!j.at("tip").is_null()) r.tip = j.at("tip").get<std::string>();
  r.difficulty = j.at("difficulty").get<int>();
  return r;
}

json header_json(std::string_view id, const GameState& s) {
  json plan = json::array();
  for (const auto& r : s.plan) plan.push_back(round_to_json(r));
  return {{"type", "session"},
          {"session_id", std::string(id)},
          {"seed", s.seed},
          {"config", config_to_json(s.config)},
          {"plan", plan},
          {"help_tips", s.help_tips}};
}

std::vector<json> read_records(const fs::path& path) {
  std::vector<json> records;
  std::size_t number = 0;
  for (const auto& raw : text::split(text::read_file(path), '\n')) {
    ++number;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(Errc::CorruptLog, e.what(), number);
    }
  }
  return records;
}

void append_lines(const fs::path& path, const std::string& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string());
  out << lines;
  out.flush();
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace

std::string event_to_json_line(std::string_view session_id, const GameEvent& e) {
  json obj = {{"type", "event"},
              {"session", std::string(session_id)},
              {"seq", e.seq},
              {"action", std::string(to_string(e.action.kind))},
              {"seconds", e.action.seconds},
              {"round", e.round_index},
              {"outcome", std::string(to_string(e.outcome))},
              {"score", e.score},
              {"lives", e.lives},
              {"time", e.time_remaining},
              {"game_time", e.game_time}};
  return obj.dump();
}

SessionStore::SessionStore(fs::path root) : dir_(std::move(root) / "sessions") {
  fs::create_directories(dir_);
}

fs::path SessionStore::path_for(std::string_view session_id) const {
  require_safe_id(session_id);
  return dir_ / (std::string(session_id) + ".jsonl");
}

bool SessionStore::exists(std::string_view session_id) const {
  return is_safe_id(session_id) && fs::exists(path_for(session_id));
}

void SessionStore::persist(std::string_view session_id, const GameState& state) const {
  const auto path = path_for(session_id);
  std::size_t stored_events = 0;
  std::string pending;
  if (fs::exists(path)) {
    auto records = read_records(path);
    if (records.empty() || records.front().value("type", "") != "session")
      throw Error(Errc::CorruptLog, "missing session header");
    if (records.front() != header_json(session_id, state))
      throw Error(Errc::CorruptLog, "stored header does not match session");
    stored_events = records.size() - 1;
    if (stored_events > state.log.size())
      throw Error(Errc::CorruptLog, "stored log is ahead of the session state");
  } else {
    pending += header_json(session_id, state).dump() + "\n";
  }
  for (std::size_t i = stored_events; i < state.log.size(); ++i)
    pending += event_to_json_line(session_id, state.log[i]) + "\n";
  if (!pending.empty()) append_lines(path, pending);
}

GameState SessionStore::load(std::string_view session_id) const {
  if (!exists(session_id))
    throw Error(Errc::UnknownSession, "no session '" + std::string(session_id) + "'");
  const auto records = read_records(path_for(session_id));
  if (records.empty() || records.front().value("type", "") != "session")
    throw Error(Errc::CorruptLog, "missing session header");

  GameState state;
  try {
    const auto& h = records.front();
    state.config = config_from_json(h.at("config"));
    state.config.validate();
    state.seed = h.at("seed").get<std::uint64_t>();
    for (const auto& r : h.at("plan")) state.plan.push_back(round_from_json(r));
    state.help_tips = h.at("help_tips").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptLog, std::string("bad header: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::CorruptLog, std::string("bad header: ") + e.what());
  }
  if (state.plan.size() != static_cast<std::size_t>(state.config.rounds_total) ||
      state.help_tips.size() != state.plan.size())
    throw Error(Errc::CorruptLog, "plan does not match config");
  state.lives = state.config.lives_start;
  state.time_remaining = state.config.time_start;

  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    try {
      const auto seq = rec.at("seq").get<std::uint64_t>();
      if (seq != i)
        throw Error(Errc::CorruptLog,
                    "expected seq " + std::to_string(i) + ", found " + std::to_string(seq));
      PlayerAction action{action_kind_from_string(rec.at("action").get<std::string>()),
                          rec.at("seconds").get<int>()};
      auto [next, outcome] = apply_action(state, action);
      const auto& e = next.log.back();
      if (to_string(e.outcome) != rec.at("outcome").get<std::string>() ||
          e.score != rec.at("score").get<int>() || e.lives != rec.at("lives").get<int>() ||
          e.time_remaining != rec.at("time").get<int>())
        throw Error(Errc::CorruptLog, "replay diverges at seq " + std::to_string(seq));
      state = std::move(next);
    } catch (const json::exception& e) {
      throw Error(Errc::CorruptLog, e.what(), i + 1);
    } catch (const Error& e) {
      if (e.code() == Errc::CorruptLog) throw;
      throw Error(Errc::CorruptLog, e.what(), i + 1);
    }
  }
  return state;
}

// --- studies ----------------------------------------------------------------

namespace {

json key_to_json(const TestKey& key) {
  json arr = json::array();
  for (const auto& item : key.items())
    arr.push_back({{"url", item.url}, {"truth", std::string(to_string(item.truth))}});
  return arr;
}

TestKey key_from_json(const json& arr) {
  std::vector<TestItem> items;
  for (const auto& item : arr)
    items.push_back({item.at("url").get<std::string>(),
                     truth_from_string(item.at("truth").get<std::string>())});
  return TestKey(std::move(items));
}

}  // namespace

StudyStore::StudyStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path StudyStore::dir_for(std::string_view study_id) const {
  require_safe_id(study_id);
  return root_ / std::string(study_id);
}

bool StudyStore::exists(std::string_view study_id) const {
  return is_safe_id(study_id) && fs::exists(dir_for(study_id) / "study.json");
}

void StudyStore::create(std::string_view study_id, const TestKey& pretest,
                        const TestKey& posttest, std::string_view created_at) const {
  std::lock_guard lock(write_mutex_);
  const auto dir = dir_for(study_id);
  if (fs::exists(dir / "study.json"))
    throw Error(Errc::DuplicateId, "study '" + std::string(study_id) + "' exists");
  fs::create_directories(dir);
  json obj = {{"id", std::string(study_id)},
              {"pretest_key", key_to_json(pretest)},
              {"posttest_key", key_to_json(posttest)},
              {"created_at", std::string(created_at)}};
  std::ofstream out(dir / "study.json", std::ios::binary | std::ios::trunc);
  out << obj.dump(2) << "\n";
  if (!out) throw Error(Errc::IoError, "cannot write study.json");
}

void StudyStore::append_record(std::string_view study_id, const StudyRecord& record) const {
  std::lock_guard lock(write_mutex_);
  const auto study = load_study_dir(dir_for(study_id));
  for (const auto& r : study.records)
    if (r.participant_id == record.participant_id)
      throw Error(Errc::DuplicateId, "participant '" + record.participant_id + "' exists");
  if (record.pre_answers.size() != study.pretest.items().size() ||
      record.post_answers.size() != study.posttest.items().size())
    throw Error(Errc::LengthMismatch, "answers do not match the study's test keys");
  append_lines(dir_for(study_id) / "records.jsonl", record_to_json_line(record) + "\n");
}

Study StudyStore::load(std::string_view study_id) const { return load_study_dir(dir_for(study_id)); }

Study load_study_dir(const fs::path& dir) {
  if (!fs::exists(dir / "study.json"))
    throw Error(Errc::NotFound, "no study.json in " + dir.string());
  json header;
  try {
    header = json::parse(text::read_file(dir / "study.json"));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("study.json: ") + e.what());
  }
  Study study{header.value("id", dir.filename().string()),
              key_from_json(header.at("pretest_key")), key_from_json(header.at("posttest_key")),
              header.value("created_at", ""), {}};

  const auto records_path = dir / "records.jsonl";
  if (!fs::exists(records_path)) return study;
  std::set<std::string> ids;
  std::size_t number = 0;
  for (const auto& raw : text::split(text::read_file(records_path), '\n')) {
    ++number;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    StudyRecord record;
    try {
      record = record_from_json_line(line);
    } catch (const Error& e) {
      throw Error(Errc::ParseError, e.what(), number);
    }
    if (!ids.insert(record.participant_id).second)
      throw Error(Errc::DuplicateId, "participant '" + record.participant_id + "'", number);
    study.records.push_back(std::move(record));
  }
  return study;
}

}  // namespace phishpond
