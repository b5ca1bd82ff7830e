#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phishpond/psychometrics.hpp"
#include "phishpond/stats.hpp"
#include "phishpond/worm_round.hpp"

namespace phishpond {

// --- corpus -----------------------------------------------------------------

enum class CorpusSource { PaperTable52, Substituted, Synthetic };

std::string_view to_string(CorpusSource source);

struct CorpusEntry {
  std::string id;
  std::string url;
  Truth label = Truth::Legit;
  std::optional<std::string> brand;
  std::optional<std::string> tip;
  int difficulty = 1;
  CorpusSource source = CorpusSource::Synthetic;

  WormRound to_round() const;
  // Tip present but not one of the canonical catalog strings.
  bool has_custom_tip() const;

  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

// One JSON object per line with fields id, url, label, brand, tip,
// difficulty, source. Every entry is validated; throws ParseError (with the
// line number) or DuplicateId.
std::vector<CorpusEntry> parse_corpus(std::string_view content);
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);
void save_corpus(std::span<const CorpusEntry> entries, const std::filesystem::path& path);
std::string corpus_to_jsonl(std::span<const CorpusEntry> entries);
const std::vector<CorpusEntry>& default_corpus();
std::vector<WormRound> to_rounds(std::span<const CorpusEntry> entries);

// --- pre/post tests ---------------------------------------------------------

inline constexpr std::size_t kTestLength = 10;

struct TestItem {
  std::string url;
  Truth truth = Truth::Legit;

  friend bool operator==(const TestItem&, const TestItem&) = default;
};

// Ten websites with known labels, mixing both classes.
class TestKey {
 public:
  explicit TestKey(std::vector<TestItem> items);

  // JSON object per line: {"url": ..., "truth": "Legit"|"Phish"}.
  static TestKey parse(std::string_view content);
  static const TestKey& default_pretest();
  static const TestKey& default_posttest();

  const std::vector<TestItem>& items() const { return items_; }

  friend bool operator==(const TestKey&, const TestKey&) = default;

 private:
  std::vector<TestItem> items_;
};

// Percent correct, a multiple of 10. Throws LengthMismatch.
double score_test(std::span<const Truth> answers, const TestKey& key);

// --- study records ----------------------------------------------------------

enum class Condition { Game, Control };

std::string_view to_string(Condition condition);
Condition condition_from_string(std::string_view s);

struct StudyRecord {
  std::string participant_id;
  Condition condition = Condition::Game;
  std::vector<Truth> pre_answers;
  std::vector<Truth> post_answers;
  std::optional<SusResponse> sus;
  std::optional<std::string> session_ref;
  std::string created_at;  // ISO-8601 UTC

  friend bool operator==(const StudyRecord&, const StudyRecord&) = default;
};

std::string record_to_json_line(const StudyRecord& record);
StudyRecord record_from_json_line(std::string_view line);

struct ConditionReport {
  Condition condition = Condition::Game;
  std::vector<std::string> participant_ids;
  std::vector<double> pre_scores;
  std::vector<double> post_scores;
  std::vector<double> deltas;  // post - pre per participant
  PairedReportRow paired;
  double improvement = 0.0;    // mean(post) - mean(pre)
  // Mean per-participant counts: legit judged phish (false positive) and
  // phish judged legit (false negative).
  double false_positives_pre = 0.0;
  double false_negatives_pre = 0.0;
  double false_positives_post = 0.0;
  double false_negatives_post = 0.0;
};

struct StudyReport {
  std::vector<ConditionReport> conditions;  // Game first, then Control

  const ConditionReport* find(Condition condition) const;
};

// Throws EmptyCondition when no condition has records, or a present
// condition has fewer than two.
StudyReport group_report(std::span<const StudyRecord> records, const TestKey& pretest,
                         const TestKey& posttest);

// Per-participant and per-condition delimited tables, then the paired
// samples blocks.
std::string render_study_report(const StudyReport& report);

}  // namespace phishpond
