#include "phishpond/study.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "phishpond/embedded.hpp"
#include "phishpond/error.hpp"
#include "phishpond/rules.hpp"
#include "phishpond/text.hpp"
#include "phishpond/url.hpp"

namespace phishpond {

using nlohmann::json;

std::string_view to_string(CorpusSource source) {
  switch (source) {
    case CorpusSource::PaperTable52: return "PaperTable52";
    case CorpusSource::Substituted: return "Substituted";
    case CorpusSource::Synthetic: return "Synthetic";
  }
  return "Unknown";
}

namespace {

CorpusSource source_from_string(std::string_view s) {
  for (auto src : {CorpusSource::PaperTable52, CorpusSource::Substituted, CorpusSource::Synthetic})
    if (to_string(src) == s) return src;
  throw Error(Errc::InvalidData, "unknown source '" + std::string(s) + "'");
}

json optional_string(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> read_optional_string(const json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return obj.at(key).get<std::string>();
}

CorpusEntry entry_from_json(const json& obj) {
  for (const char* key : {"id", "url", "label", "difficulty", "source"})
    if (!obj.contains(key)) throw Error(Errc::InvalidData, std::string("missing field '") + key + "'");
  CorpusEntry e;
  e.id = obj.at("id").get<std::string>();
  e.url = obj.at("url").get<std::string>();
  e.label = truth_from_string(obj.at("label").get<std::string>());
  e.brand = read_optional_string(obj, "brand");
  e.tip = read_optional_string(obj, "tip");
  e.difficulty = obj.at("difficulty").get<int>();
  e.source = source_from_string(obj.at("source").get<std::string>());
  if (e.id.empty()) throw Error(Errc::InvalidData, "empty id");
  if (e.difficulty < 1 || e.difficulty > 5) throw Error(Errc::InvalidData, "difficulty outside 1..5");
  parse_url(e.url);
  return e;
}

json entry_to_json(const CorpusEntry& e) {
  // Field order is part of the file format.
  json obj = json::object();
  obj["id"] = e.id;
  obj["url"] = e.url;
  obj["label"] = std::string(to_string(e.label));
  obj["brand"] = optional_string(e.brand);
  obj["tip"] = optional_string(e.tip);
  obj["difficulty"] = e.difficulty;
  obj["source"] = std::string(to_string(e.source));
  return obj;
}

std::string dump_ordered(const CorpusEntry& e) {
  // nlohmann::json sorts keys; build the line by hand to keep the documented order.
  std::string out = "{";
  auto field = [&](const char* key, const json& value, bool last = false) {
    out += json(key).dump() + ":" + value.dump();
    if (!last) out += ",";
  };
  const auto obj = entry_to_json(e);
  field("id", obj["id"]);
  field("url", obj["url"]);
  field("label", obj["label"]);
  field("brand", obj["brand"]);
  field("tip", obj["tip"]);
  field("difficulty", obj["difficulty"]);
  field("source", obj["source"], true);
  return out + "}";
}

}  // namespace

WormRound CorpusEntry::to_round() const { return WormRound{id, url, label, tip, difficulty}; }

bool CorpusEntry::has_custom_tip() const {
  return tip && !TipCatalog::embedded().is_canonical(*tip);
}

std::vector<CorpusEntry> parse_corpus(std::string_view content) {
  std::vector<CorpusEntry> entries;
  std::set<std::string> ids;
  std::size_t number = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++number;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    CorpusEntry entry;
    try {
      entry = entry_from_json(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, e.what(), number);
    } catch (const Error& e) {
      throw Error(Errc::ParseError, e.what(), number);
    }
    if (!ids.insert(entry.id).second)
      throw Error(Errc::DuplicateId, "duplicate id '" + entry.id + "'", number);
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(text::read_file(path));
}

std::string corpus_to_jsonl(std::span<const CorpusEntry> entries) {
  std::string out;
  for (const auto& e : entries) out += dump_ordered(e) + "\n";
  return out;
}

void save_corpus(std::span<const CorpusEntry> entries, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << corpus_to_jsonl(entries);
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

const std::vector<CorpusEntry>& default_corpus() {
  static const std::vector<CorpusEntry> corpus = parse_corpus(embedded::corpus_jsonl());
  return corpus;
}

std::vector<WormRound> to_rounds(std::span<const CorpusEntry> entries) {
  std::vector<WormRound> rounds;
  rounds.reserve(entries.size());
  for (const auto& e : entries) rounds.push_back(e.to_round());
  return rounds;
}

// --- TestKey ----------------------------------------------------------------

TestKey::TestKey(std::vector<TestItem> items) : items_(std::move(items)) {
  if (items_.size() != kTestLength)
    throw Error(Errc::LengthMismatch,
                "test key needs 10 items, got " + std::to_string(items_.size()));
  auto legit = std::count_if(items_.begin(), items_.end(),
                             [](const TestItem& i) { return i.truth == Truth::Legit; });
  if (legit == 0 || legit == static_cast<long>(items_.size()))
    throw Error(Errc::InvalidData, "test key must mix legit and phishing sites");
  for (const auto& item : items_) parse_url(item.url);
}

TestKey TestKey::parse(std::string_view content) {
  std::vector<TestItem> items;
  std::size_t number = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++number;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    try {
      auto obj = json::parse(line);
      items.push_back({obj.at("url").get<std::string>(),
                       truth_from_string(obj.at("truth").get<std::string>())});
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, e.what(), number);
    } catch (const Error& e) {
      throw Error(Errc::ParseError, e.what(), number);
    }
  }
  return TestKey(std::move(items));
}

const TestKey& TestKey::default_pretest() {
  static const TestKey key = parse(embedded::pretest_key_jsonl());
  return key;
}

const TestKey& TestKey::default_posttest() {
  static const TestKey key = parse(embedded::posttest_key_jsonl());
  return key;
}

double score_test(std::span<const Truth> answers, const TestKey& key) {
  if (answers.size() != key.items().size())
    throw Error(Errc::LengthMismatch, "expected " + std::to_string(key.items().size()) +
                                          " answers, got " + std::to_string(answers.size()));
  int correct = 0;
  for (std::size_t i = 0; i < answers.size(); ++i)
    if (answers[i] == key.items()[i].truth) ++correct;
  return 100.0 * correct / static_cast<double>(key.items().size());
}

// --- records ----------------------------------------------------------------

std::string_view to_string(Condition condition) {
  return condition == Condition::Game ? "Game" : "Control";
}

Condition condition_from_string(std::string_view s) {
  if (s == "Game") return Condition::Game;
  if (s == "Control") return Condition::Control;
  throw Error(Errc::InvalidData, "unknown condition '" + std::string(s) + "'");
}

namespace {

json answers_to_json(const std::vector<Truth>& answers) {
  json arr = json::array();
  for (auto a : answers) arr.push_back(std::string(to_string(a)));
  return arr;
}

std::vector<Truth> answers_from_json(const json& arr) {
  std::vector<Truth> out;
  for (const auto& a : arr) out.push_back(truth_from_string(a.get<std::string>()));
  return out;
}

}  // namespace

std::string record_to_json_line(const StudyRecord& r) {
  json obj;
  obj["participant_id"] = r.participant_id;
  obj["condition"] = std::string(to_string(r.condition));
  obj["pre_answers"] = answers_to_json(r.pre_answers);
  obj["post_answers"] = answers_to_json(r.post_answers);
  if (r.sus) {
    obj["sus"] = json(std::vector<int>(r.sus->items().begin(), r.sus->items().end()));
  } else {
    obj["sus"] = nullptr;
  }
  obj["session_ref"] = optional_string(r.session_ref);
  obj["created_at"] = r.created_at;
  return obj.dump();
}

StudyRecord record_from_json_line(std::string_view line) {
  try {
    auto obj = json::parse(line);
    StudyRecord r;
    r.participant_id = obj.at("participant_id").get<std::string>();
    r.condition = condition_from_string(obj.at("condition").get<std::string>());
    r.pre_answers = answers_from_json(obj.at("pre_answers"));
    r.post_answers = answers_from_json(obj.at("post_answers"));
    if (obj.contains("sus") && !obj.at("sus").is_null())
      r.sus = SusResponse(obj.at("sus").get<std::vector<int>>());
    r.session_ref = read_optional_string(obj, "session_ref");
    r.created_at = obj.value("created_at", "");
    if (r.participant_id.empty()) throw Error(Errc::InvalidData, "empty participant_id");
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

// --- report -----------------------------------------------------------------

const ConditionReport* StudyReport::find(Condition condition) const {
  for (const auto& c : conditions)
    if (c.condition == condition) return &c;
  return nullptr;
}

namespace {

std::pair<int, int> error_counts(std::span<const Truth> answers, const TestKey& key) {
  int fp = 0;
  int fn = 0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const auto truth = key.items()[i].truth;
    if (truth == Truth::Legit && answers[i] == Truth::Phish) ++fp;
    if (truth == Truth::Phish && answers[i] == Truth::Legit) ++fn;
  }
  return {fp, fn};
}

}  // namespace

StudyReport group_report(std::span<const StudyRecord> records, const TestKey& pretest,
                         const TestKey& posttest) {
  StudyReport report;
  for (auto condition : {Condition::Game, Condition::Control}) {
    ConditionReport c;
    c.condition = condition;
    for (const auto& r : records) {
      if (r.condition != condition) continue;
      c.participant_ids.push_back(r.participant_id);
      c.pre_scores.push_back(score_test(r.pre_answers, pretest));
      c.post_scores.push_back(score_test(r.post_answers, posttest));
      c.deltas.push_back(c.post_scores.back() - c.pre_scores.back());
      auto [fp_pre, fn_pre] = error_counts(r.pre_answers, pretest);
      auto [fp_post, fn_post] = error_counts(r.post_answers, posttest);
      c.false_positives_pre += fp_pre;
      c.false_negatives_pre += fn_pre;
      c.false_positives_post += fp_post;
      c.false_negatives_post += fn_post;
    }
    const auto n = c.participant_ids.size();
    if (n == 0) continue;
    if (n < 2)
      throw Error(Errc::EmptyCondition,
                  std::string(to_string(condition)) + " condition needs at least 2 records");
    const double nd = static_cast<double>(n);
    c.false_positives_pre /= nd;
    c.false_negatives_pre /= nd;
    c.false_positives_post /= nd;
    c.false_negatives_post /= nd;
    const std::string name(to_string(condition));
    c.paired = make_report_row(name + "PreTest", name + "PostTest",
                               PairedSample{c.pre_scores, c.post_scores});
    c.improvement = c.paired.post.mean - c.paired.pre.mean;
    report.conditions.push_back(std::move(c));
  }
  if (report.conditions.empty()) throw Error(Errc::EmptyCondition, "no study records");
  return report;
}

std::string render_study_report(const StudyReport& report) {
  std::string out;
  char line[256];
  out += "participant_id,condition,pre,post,delta\n";
  for (const auto& c : report.conditions) {
    for (std::size_t i = 0; i < c.participant_ids.size(); ++i) {
      std::snprintf(line, sizeof line, "%s,%s,%.0f,%.0f,%.0f\n", c.participant_ids[i].c_str(),
                    std::string(to_string(c.condition)).c_str(), c.pre_scores[i],
                    c.post_scores[i], c.deltas[i]);
      out += line;
    }
  }
  out += "\ncondition,n,pre_mean,pre_sd,post_mean,post_sd,improvement,"
         "fp_pre,fn_pre,fp_post,fn_post\n";
  for (const auto& c : report.conditions) {
    std::snprintf(line, sizeof line, "%s,%zu,%.2f,%.3f,%.2f,%.3f,%.2f,%.2f,%.2f,%.2f,%.2f\n",
                  std::string(to_string(c.condition)).c_str(), c.paired.pre.n, c.paired.pre.mean,
                  c.paired.pre.sd, c.paired.post.mean, c.paired.post.sd, c.improvement,
                  c.false_positives_pre, c.false_negatives_pre, c.false_positives_post,
                  c.false_negatives_post);
    out += line;
  }
  out += "\n";
  std::vector<PairedReportRow> rows;
  for (const auto& c : report.conditions) rows.push_back(c.paired);
  out += render_paired_report(rows);
  return out;
}

}  // namespace phishpond
