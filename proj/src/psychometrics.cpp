#include "phishpond/psychometrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "phishpond/embedded.hpp"
#include "phishpond/error.hpp"
#include "phishpond/stats.hpp"
#include "phishpond/text.hpp"

namespace phishpond {

namespace {

void check_likert(int value, const std::string& where) {
  if (value < kLikertMin || value > kLikertMax)
    throw Error(Errc::OutOfRangeItem, where + " has value " + std::to_string(value));
}

}  // namespace

SusResponse::SusResponse(std::span<const int> items) {
  if (items.size() != kSusItems)
    throw Error(Errc::LengthMismatch,
                "SUS response needs 10 items, got " + std::to_string(items.size()));
  for (std::size_t i = 0; i < kSusItems; ++i) {
    check_likert(items[i], "SUS item " + std::to_string(i + 1));
    items_[i] = items[i];
  }
}

SusResponse::SusResponse(std::initializer_list<int> items)
    : SusResponse(std::span<const int>(items.begin(), items.size())) {}

double sus_item_contribution(std::size_t item_index, double position) {
  // item_index is 0-based, so even indices are the odd-numbered items.
  return item_index % 2 == 0 ? position - 1.0 : 5.0 - position;
}

double sus_score(const SusResponse& response) {
  int sum = 0;
  for (std::size_t i = 0; i < kSusItems; ++i) {
    const int v = response.items()[i];
    sum += i % 2 == 0 ? v - 1 : 5 - v;
  }
  return 2.5 * sum;
}

SusGroupReport sus_group(std::span<const SusResponse> responses) {
  if (responses.empty()) throw Error(Errc::EmptyGroup, "no SUS responses");
  SusGroupReport report;
  const auto n = responses.size();
  for (std::size_t item = 0; item < kSusItems; ++item) {
    std::vector<double> column;
    column.reserve(n);
    for (const auto& r : responses) column.push_back(r.items()[item]);
    report.per_item_mean[item] = mean(column);
    report.per_item_sd[item] = n > 1 ? std::sqrt(sample_variance(column)) : 0.0;
  }
  report.per_respondent_scores.reserve(n);
  for (const auto& r : responses) report.per_respondent_scores.push_back(sus_score(r));
  report.overall_mean = mean(report.per_respondent_scores);
  return report;
}

const std::vector<std::string>& sus_item_texts() {
  static const std::vector<std::string> items = [] {
    std::vector<std::string> out;
    for (auto& [line, value] : text::content_lines(embedded::sus_items_txt()))
      out.push_back(std::move(value));
    if (out.size() != kSusItems) throw Error(Errc::InvalidData, "SUS catalog needs 10 items");
    return out;
  }();
  return items;
}

// --- LikertMatrix -----------------------------------------------------------

LikertMatrix::LikertMatrix(std::vector<std::string> labels, std::vector<std::vector<int>> rows)
    : labels_(std::move(labels)), rows_(std::move(rows)) {
  if (labels_.empty()) throw Error(Errc::InvalidData, "matrix has no items");
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != labels_.size())
      throw Error(Errc::RowMismatch, "row " + std::to_string(r + 1) + " has " +
                                         std::to_string(rows_[r].size()) + " values, expected " +
                                         std::to_string(labels_.size()));
    for (std::size_t c = 0; c < rows_[r].size(); ++c)
      check_likert(rows_[r][c], "row " + std::to_string(r + 1) + " item " + labels_[c]);
  }
}

LikertMatrix LikertMatrix::parse(std::string_view content) {
  auto lines = text::content_lines(content);
  if (lines.empty()) throw Error(Errc::ParseError, "missing header row", 1);
  const auto& header = lines.front().second;
  char delim = ',';
  for (char candidate : {'\t', ';', ','})
    if (header.find(candidate) != std::string::npos) delim = candidate;

  std::vector<std::string> labels;
  for (const auto& f : text::split(header, delim)) labels.emplace_back(text::trim(f));

  std::vector<std::vector<int>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [line, value] = lines[i];
    auto fields = text::split(value, delim);
    if (fields.size() != labels.size())
      throw Error(Errc::ParseError,
                  "expected " + std::to_string(labels.size()) + " fields, got " +
                      std::to_string(fields.size()),
                  line);
    std::vector<int> row;
    for (const auto& f : fields) {
      auto t = text::trim(f);
      if (!text::is_digits(t)) throw Error(Errc::ParseError, "not an integer: '" + f + "'", line);
      int v = std::stoi(std::string(t));
      if (v < kLikertMin || v > kLikertMax)
        throw Error(Errc::OutOfRangeItem, "value " + std::to_string(v) + " on line " +
                                              std::to_string(line));
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return LikertMatrix(std::move(labels), std::move(rows));
}

LikertMatrix LikertMatrix::load(const std::filesystem::path& path) {
  return parse(text::read_file(path));
}

// --- constructs -------------------------------------------------------------

void ConstructSpec::validate(std::size_t item_count) const {
  if (item_indices.empty()) throw Error(Errc::InvalidData, name + ": construct has no items");
  if (reverse_coded.size() != item_indices.size())
    throw Error(Errc::InvalidData, name + ": reverse_coded must parallel item_indices");
  std::set<std::size_t> seen;
  for (auto idx : item_indices) {
    if (idx >= item_count)
      throw Error(Errc::IndexOutOfRange, name + ": item " + std::to_string(idx) +
                                             " outside matrix of " + std::to_string(item_count));
    if (!seen.insert(idx).second)
      throw Error(Errc::InvalidData, name + ": duplicate item " + std::to_string(idx));
  }
}

int fold_reverse(int value) { return kLikertMax + kLikertMin - value; }

namespace {

std::vector<std::vector<double>> folded_columns(const LikertMatrix& matrix,
                                                const ConstructSpec& construct) {
  construct.validate(matrix.items());
  std::vector<std::vector<double>> columns;
  for (std::size_t k = 0; k < construct.item_indices.size(); ++k) {
    std::vector<double> col;
    col.reserve(matrix.respondents());
    for (const auto& row : matrix.rows()) {
      int v = row[construct.item_indices[k]];
      col.push_back(construct.reverse_coded[k] ? fold_reverse(v) : v);
    }
    columns.push_back(std::move(col));
  }
  return columns;
}

}  // namespace

double cronbach_alpha(const LikertMatrix& matrix, const ConstructSpec& construct) {
  const auto columns = folded_columns(matrix, construct);
  const auto n = matrix.respondents();
  const auto k = columns.size();
  if (n < 2) throw Error(Errc::InsufficientData, "alpha needs at least 2 respondents");
  if (k < 2) throw Error(Errc::InsufficientData, "alpha needs at least 2 items");

  std::vector<double> totals(n, 0.0);
  double item_variance_sum = 0.0;
  for (const auto& col : columns) {
    item_variance_sum += sample_variance(col);
    for (std::size_t r = 0; r < n; ++r) totals[r] += col[r];
  }
  const double total_variance = sample_variance(totals);
  if (total_variance == 0.0) throw Error(Errc::ZeroTotalVariance, "all row sums are identical");
  const double kd = static_cast<double>(k);
  return kd / (kd - 1.0) * (1.0 - item_variance_sum / total_variance);
}

std::vector<double> construct_scores(const LikertMatrix& matrix, const ConstructSpec& construct) {
  const auto columns = folded_columns(matrix, construct);
  std::vector<double> scores(matrix.respondents(), 0.0);
  for (const auto& col : columns)
    for (std::size_t r = 0; r < col.size(); ++r) scores[r] += col[r];
  for (auto& s : scores) s /= static_cast<double>(columns.size());
  return scores;
}

}  // namespace phishpond
