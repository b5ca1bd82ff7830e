#include <doctest.h>

#include <random>

#include "phishpond/psychometrics.hpp"
#include "support.hpp"

using namespace phishpond;
using testsupport::error_of;

namespace {

// Per-item mean and SD of the usability table the fixture was built to.
constexpr double kTableMeans[10] = {3.95, 1.50, 4.55, 1.70, 4.20, 1.65, 4.45, 1.60, 4.35, 1.60};
constexpr double kTableSds[10] = {0.759, 0.607, 0.510, 0.865, 0.696,
                                  0.671, 0.686, 0.503, 0.587, 0.754};

std::vector<SusResponse> fixture_responses() {
  const auto m = LikertMatrix::load(testsupport::example("sus_responses.csv"));
  std::vector<SusResponse> out;
  for (const auto& row : m.rows()) out.emplace_back(row);
  return out;
}

LikertMatrix matrix(std::vector<std::vector<int>> rows) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < rows.at(0).size(); ++i) labels.push_back("q" + std::to_string(i + 1));
  return LikertMatrix(labels, std::move(rows));
}

ConstructSpec all_items(std::size_t k) {
  ConstructSpec spec{"all", {}, {}};
  for (std::size_t i = 0; i < k; ++i) {
    spec.item_indices.push_back(i);
    spec.reverse_coded.push_back(false);
  }
  return spec;
}

}  // namespace

TEST_CASE("sus_score examples") {
  CHECK(sus_score({5, 1, 5, 1, 5, 1, 5, 1, 5, 1}) == 100.0);
  CHECK(sus_score({1, 5, 1, 5, 1, 5, 1, 5, 1, 5}) == 0.0);
  CHECK(sus_score({3, 3, 3, 3, 3, 3, 3, 3, 3, 3}) == 50.0);
  CHECK(sus_score({4, 2, 5, 2, 4, 2, 4, 2, 4, 2}) == 77.5);
}

TEST_CASE("SusResponse validation") {
  CHECK(error_of([] { SusResponse({1, 2, 3}); }) == Errc::LengthMismatch);
  CHECK(error_of([] { SusResponse({0, 2, 3, 3, 3, 3, 3, 3, 3, 3}); }) == Errc::OutOfRangeItem);
  CHECK(error_of([] { SusResponse({6, 2, 3, 3, 3, 3, 3, 3, 3, 3}); }) == Errc::OutOfRangeItem);
}

TEST_CASE("sus_score monotonicity in every item") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pos(1, 5);
  for (int n = 0; n < 500; ++n) {
    std::vector<int> items(10);
    for (auto& v : items) v = pos(rng);
    const double base = sus_score(SusResponse(items));
    CHECK(std::fmod(base, 2.5) == 0.0);
    for (std::size_t i = 0; i < 10; ++i) {
      if (items[i] == 5) continue;
      auto up = items;
      ++up[i];
      const double s = sus_score(SusResponse(up));
      if (i % 2 == 0) CHECK(s > base);
      else CHECK(s < base);
    }
  }
}

TEST_CASE("sus_group on the 20-respondent fixture") {
  const auto responses = fixture_responses();
  REQUIRE(responses.size() == 20);
  const auto r = sus_group(responses);
  CHECK(r.overall_mean == doctest::Approx(83.625).epsilon(1e-12));
  CHECK(std::abs(r.overall_mean - 83.62) <= 0.01);
  double contributions = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    CAPTURE(i);
    CHECK(std::abs(r.per_item_mean[i] - kTableMeans[i]) < 1e-12);
    CHECK(std::abs(r.per_item_sd[i] - kTableSds[i]) < 0.0005);
    contributions += sus_item_contribution(i, r.per_item_mean[i]);
  }
  // Linearity: group mean equals the score of the mean responses.
  CHECK(std::abs(2.5 * contributions - r.overall_mean) < 1e-9);
  double sum = 0;
  for (double s : r.per_respondent_scores) sum += s;
  CHECK(std::abs(sum / 20 - r.overall_mean) < 1e-12);
}

TEST_CASE("sus_group small cases") {
  CHECK(error_of([] { sus_group({}); }) == Errc::EmptyGroup);
  const std::vector<SusResponse> one{{4, 2, 5, 2, 4, 2, 4, 2, 4, 2}};
  CHECK(sus_group(one).overall_mean == 77.5);
  CHECK(sus_group(one).per_item_sd[0] == 0.0);
  const std::vector<SusResponse> two{{3, 3, 3, 3, 3, 3, 3, 3, 3, 1},   // 55
                                     {3, 3, 3, 3, 3, 3, 3, 3, 3, 5}};  // 45
  CHECK(sus_group(two).overall_mean == 50.0);
}

TEST_CASE("SUS item wording") {
  const auto& texts = sus_item_texts();
  REQUIRE(texts.size() == 10);
  CHECK(texts[7] == "I found the mobile game very awkward to use");
  CHECK(texts[0] == "I think that I would like to use this mobile game frequently");
}

TEST_CASE("LikertMatrix parsing") {
  const auto m = LikertMatrix::parse("a;b;c\n1;2;3\n4;5;5\n");
  CHECK(m.respondents() == 2);
  CHECK(m.items() == 3);
  CHECK(m.at(1, 2) == 5);
  CHECK(LikertMatrix::parse("a\tb\n1\t2\n").at(0, 1) == 2);
  CHECK_THROWS_AS(LikertMatrix::parse("a,b\n1,2,3\n"), Error);
  CHECK_THROWS_AS(LikertMatrix::parse("a,b\n1,7\n"), Error);
  CHECK_THROWS_AS(LikertMatrix::parse("a,b\n1,x\n"), Error);
}

TEST_CASE("cronbach_alpha against a fraction-arithmetic oracle") {
  // Worked by hand in exact fractions: alpha = 48/49.
  const auto m = matrix({{1, 2, 3}, {2, 3, 4}, {3, 4, 5}, {4, 5, 5}});
  CHECK(std::abs(cronbach_alpha(m, all_items(3)) - 48.0 / 49.0) < 1e-9);
}

TEST_CASE("cronbach_alpha properties") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pos(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<int>> dup, base, shifted;
    for (int r = 0; r < 12; ++r) {
      const int v = pos(rng);
      dup.push_back({v, v, v, v});
      base.push_back({pos(rng), pos(rng), pos(rng)});
      shifted.push_back(base.back());
    }
    dup[0] = {1, 1, 1, 1};
    dup[1] = {5, 5, 5, 5};
    CHECK(std::abs(cronbach_alpha(matrix(dup), all_items(4)) - 1.0) < 1e-9);

    // Shift every cell by -1 (keeps values in range) and shuffle respondents.
    for (auto& row : shifted)
      for (auto& v : row) v = v == 1 ? 1 : v - 1;
    bool can_shift = true;
    for (const auto& row : base)
      for (int v : row) can_shift &= v > 1;
    try {
      const double a = cronbach_alpha(matrix(base), all_items(3));
      auto permuted = base;
      std::shuffle(permuted.begin(), permuted.end(), rng);
      CHECK(std::abs(cronbach_alpha(matrix(permuted), all_items(3)) - a) < 1e-12);
      if (can_shift) CHECK(std::abs(cronbach_alpha(matrix(shifted), all_items(3)) - a) < 1e-12);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ZeroTotalVariance);
    }
  }
}

TEST_CASE("cronbach_alpha of independent columns is near zero") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> pos(1, 5);
  std::vector<std::vector<int>> rows(10000, std::vector<int>(4));
  for (auto& row : rows)
    for (auto& v : row) v = pos(rng);
  CHECK(std::abs(cronbach_alpha(matrix(rows), all_items(4))) < 0.05);
}

TEST_CASE("cronbach_alpha errors") {
  CHECK(error_of([] { cronbach_alpha(matrix({{1, 2, 3}}), all_items(3)); }) ==
        Errc::InsufficientData);
  CHECK(error_of([] { cronbach_alpha(matrix({{1, 5}, {5, 1}, {3, 3}}), all_items(2)); }) ==
        Errc::ZeroTotalVariance);
}

TEST_CASE("construct scores and reverse coding") {
  CHECK(fold_reverse(5) == 1);
  CHECK(fold_reverse(1) == 5);
  const ConstructSpec susceptibility{"Perceived Susceptibility", {0, 1, 2}, {false, false, true}};
  CHECK(construct_scores(matrix({{4, 4, 2}}), susceptibility) == std::vector<double>{4.0});
  CHECK(construct_scores(matrix({{3, 3, 3}, {3, 3, 3}}), all_items(3)) ==
        std::vector<double>{3.0, 3.0});
  const ConstructSpec bad{"bad", {0, 7}, {false, false}};
  CHECK(error_of([&] { construct_scores(matrix({{1, 2}}), bad); }) == Errc::IndexOutOfRange);
  const ConstructSpec dup{"dup", {0, 0}, {false, false}};
  CHECK_THROWS_AS(dup.validate(2), Error);
  // Reverse-coding one item flips its contribution: (6 - 5) = 1.
  const ConstructSpec rev{"rev", {0}, {true}};
  CHECK(construct_scores(matrix({{5}}), rev) == std::vector<double>{1.0});
}
