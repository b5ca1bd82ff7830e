#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phishpond {

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;
inline constexpr std::size_t kSusItems = 10;

// One completed System Usability Scale questionnaire, items in catalog order.
class SusResponse {
 public:
  // Throws Error(OutOfRangeItem) for a value outside 1..5 and
  // Error(LengthMismatch) when there are not exactly ten items.
  explicit SusResponse(std::span<const int> items);
  SusResponse(std::initializer_list<int> items);

  const std::array<int, kSusItems>& items() const { return items_; }

  friend bool operator==(const SusResponse&, const SusResponse&) = default;

 private:
  std::array<int, kSusItems> items_{};
};

// Odd-numbered items contribute (position - 1), even-numbered (5 - position).
double sus_item_contribution(std::size_t item_index, double position);

// 2.5 x the summed contributions; always a multiple of 2.5 in [0, 100].
double sus_score(const SusResponse& response);

struct SusGroupReport {
  std::array<double, kSusItems> per_item_mean{};
  // Sample (n-1) standard deviations; zero for a single respondent.
  std::array<double, kSusItems> per_item_sd{};
  std::vector<double> per_respondent_scores;
  double overall_mean = 0.0;
};

SusGroupReport sus_group(std::span<const SusResponse> responses);

// Item wording, verbatim, with item 8 reading "awkward".
const std::vector<std::string>& sus_item_texts();

// Respondents x items matrix of Likert answers.
class LikertMatrix {
 public:
  LikertMatrix(std::vector<std::string> labels, std::vector<std::vector<int>> rows);

  // Delimited text with a header row; the delimiter (comma, tab or
  // semicolon) is taken from the header.
  static LikertMatrix parse(std::string_view content);
  static LikertMatrix load(const std::filesystem::path& path);

  std::size_t respondents() const { return rows_.size(); }
  std::size_t items() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<int>>& rows() const { return rows_; }
  int at(std::size_t respondent, std::size_t item) const { return rows_[respondent][item]; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> rows_;
};

struct ConstructSpec {
  std::string name;
  std::vector<std::size_t> item_indices;
  std::vector<bool> reverse_coded;  // parallel to item_indices

  // Throws IndexOutOfRange / InvalidData.
  void validate(std::size_t item_count) const;
};

// Reverse-coded answers fold to 6 - v.
int fold_reverse(int value);

// k/(k-1) * (1 - sum of item variances / variance of row sums), sample
// variances throughout. Throws InsufficientData or ZeroTotalVariance.
double cronbach_alpha(const LikertMatrix& matrix, const ConstructSpec& construct);

// Per-respondent mean of the construct's (folded) items.
std::vector<double> construct_scores(const LikertMatrix& matrix, const ConstructSpec& construct);

}  // namespace phishpond
