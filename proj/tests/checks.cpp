#include "checks.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "phishpond/error.hpp"
#include "phishpond/store.hpp"
#include "phishpond/study.hpp"

using namespace phishpond;

namespace checks {

GameConfig mini_config(bool advance_on_error) {
  GameConfig c;
  c.lives_start = 2;
  c.time_start = 300;
  c.help_cost = 100;
  c.rounds_total = 3;
  c.legit_count = 2;
  c.phish_count = 1;
  c.points_per_correct = 1;
  c.advance_on_error = advance_on_error;
  return c;
}

std::vector<WormRound> mini_pool() {
  return {
      {"m1", "http://www.nationwide.co.uk/", Truth::Legit, std::nullopt, 1},
      {"m2", "www.paypa1.com", Truth::Phish, std::nullopt, 2},
      {"m3", "https://ibank.barclays.co.uk/", Truth::Legit, std::nullopt, 2},
  };
}

namespace {

struct Walker {
  EnumerationResult result;
  std::vector<PlayerAction> path;

  void fail(const std::string& what) {
    if (result.violations.size() >= 20) return;
    std::ostringstream os;
    os << what << " after [";
    for (const auto& a : path) {
      os << to_string(a.kind);
      if (a.kind == PlayerAction::Kind::Tick) os << a.seconds;
      os << ' ';
    }
    os << "]";
    result.violations.push_back(os.str());
  }

  // Invariants that must hold for every reachable state.
  void check_state(const GameState& s) {
    const auto& c = s.config;
    if (s.lives < 0 || s.lives > c.lives_start) fail("lives out of bounds");
    if (s.score < 0 || s.score > c.rounds_total * c.points_per_correct) fail("score out of bounds");
    if (s.time_remaining < 0 || s.time_remaining > c.time_start) fail("time out of bounds");
    if (s.round_index < 0 || s.round_index > c.rounds_total) fail("round index out of bounds");

    int correct = 0, wrong = 0, helps = 0, ticked = 0;
    for (std::size_t i = 0; i < s.log.size(); ++i) {
      const auto& e = s.log[i];
      if (e.seq != i + 1) fail("log sequence gap");
      correct += e.outcome == OutcomeKind::Correct;
      wrong += e.outcome == OutcomeKind::WrongLostLife;
      helps += e.outcome == OutcomeKind::HelpGiven;
      if (e.action.kind == PlayerAction::Kind::Tick) ticked += e.action.seconds;
    }
    if (s.score != correct * c.points_per_correct) fail("score != correct answers");
    if (s.lives != c.lives_start - wrong) fail("lives != lives_start - mistakes");
    const int spent = helps * c.help_cost + ticked;
    if (s.status == GameStatus::TimeUp) {
      if (s.time_remaining != 0 || spent < c.time_start) fail("TimeUp without the clock spent");
    } else if (c.time_start - s.time_remaining != spent) {
      fail("help/tick time not conserved");
    }
    if (c.advance_on_error) {
      if (s.round_index != correct + wrong) fail("round index != resolved answers");
      if (s.score + (c.lives_start - s.lives) < correct + wrong) fail("attempt accounting");
    } else if (s.round_index != correct) {
      fail("round index != correct answers");
    }
    const bool should_end = s.time_remaining <= 0 || s.lives <= 0 || s.round_index >= c.rounds_total;
    if (should_end == (s.status == GameStatus::InProgress)) fail("status disagrees with counters");
    if (s.status == GameStatus::OutOfLives && s.time_remaining <= 0) fail("precedence: TimeUp first");
    if (s.status == GameStatus::Completed && (s.lives <= 0 || s.time_remaining <= 0))
      fail("precedence: Completed last");
  }

  void walk(const GameState& s) {
    ++result.states;
    check_state(s);
    static const PlayerAction actions[] = {PlayerAction::eat(), PlayerAction::avoid(),
                                           PlayerAction::help(), PlayerAction::tick(60),
                                           PlayerAction::tick(150)};
    if (s.status != GameStatus::InProgress) {
      ++result.terminal_states;
      for (const auto& a : actions) {
        try {
          (void)apply_action(s, a);
          fail("terminal state accepted an action");
        } catch (const Error& e) {
          if (e.code() != Errc::SessionFinished) fail("terminal state: wrong error");
        }
      }
      return;
    }
    for (const auto& a : actions) {
      const auto [next, outcome] = apply_action(s, a);
      path.push_back(a);
      if (next.time_remaining > s.time_remaining) fail("time went up");
      if (next.log.size() != s.log.size() + 1) fail("log did not grow by one");
      if (outcome.status != next.status) fail("outcome status mismatch");
      if (outcome.kind == OutcomeKind::Correct && outcome.feedback != kCorrectFeedback)
        fail("correct feedback text");
      if (outcome.kind == OutcomeKind::WrongLostLife && outcome.feedback != kWrongFeedback)
        fail("wrong feedback text");
      if (a.kind == PlayerAction::Kind::RequestHelp) {
        if (outcome.kind != OutcomeKind::HelpGiven || !outcome.tip) fail("help without tip");
        else if (*outcome.tip != s.help_tips[static_cast<std::size_t>(s.round_index)])
          fail("help tip is not the round's tip");
        if (next.round_index != s.round_index || next.score != s.score || next.lives != s.lives)
          fail("help changed more than the clock");
      }
      const bool answer = a.kind == PlayerAction::Kind::Eat || a.kind == PlayerAction::Kind::Avoid;
      if (answer != outcome.resolved.has_value()) fail("resolved round only on answers");
      if (answer && outcome.resolved && *outcome.resolved != s.plan[static_cast<std::size_t>(s.round_index)])
        fail("resolved round is not the current round");
      walk(next);
      path.pop_back();
    }
  }
};

}  // namespace

EnumerationResult enumerate_mini(bool advance_on_error, std::uint64_t seed) {
  const auto pool = mini_pool();
  Walker w;
  w.walk(new_session(mini_config(advance_on_error), pool, seed));
  return w.result;
}

FuzzResult replay_fuzz(const std::filesystem::path& root, int runs, std::uint64_t base_seed) {
  FuzzResult result;
  const auto pool = to_rounds(default_corpus());
  const SessionStore store(root);
  std::mt19937_64 rng(base_seed);
  for (int run = 0; run < runs; ++run) {
    ++result.runs;
    const std::uint64_t seed = rng();
    GameConfig config;
    config.advance_on_error = rng() % 4 != 0;
    auto state = new_session(config, pool, seed);
    std::vector<PlayerAction> actions;
    const auto length = 1 + rng() % 40;
    for (std::uint64_t i = 0; i < length && state.status == GameStatus::InProgress; ++i) {
      PlayerAction a;
      switch (rng() % 5) {
        case 0: a = PlayerAction::eat(); break;
        case 1: a = PlayerAction::avoid(); break;
        case 2: a = PlayerAction::help(); break;
        default: a = PlayerAction::tick(1 + static_cast<int>(rng() % 90)); break;
      }
      state = apply_action(state, a).first;
      actions.push_back(a);
      // Persist mid-run as well, so appends are exercised.
      if (i % 7 == 3) store.persist("fuzz-" + std::to_string(run), state);
    }
    const auto id = "fuzz-" + std::to_string(run);
    try {
      store.persist(id, state);
      const auto loaded = store.load(id);
      const auto replayed = replay(config, pool, seed, actions);
      if (loaded == state && replayed == state) ++result.matched;
      else result.failures.push_back(id + " diverged");
    } catch (const Error& e) {
      result.failures.push_back(id + ": " + e.what());
    }
  }
  return result;
}

double kmo_inverse_oracle(const std::vector<std::vector<double>>& r) {
  const std::size_t n = r.size();
  std::vector<std::vector<double>> a = r;
  for (std::size_t i = 0; i < n; ++i) {
    a[i].resize(2 * n, 0.0);
    a[i][n + i] = 1.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t k = c + 1; k < n; ++k)
      if (std::abs(a[k][c]) > std::abs(a[p][c])) p = k;
    std::swap(a[c], a[p]);
    const double pivot = a[c][c];
    for (auto& v : a[c]) v /= pivot;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == c) continue;
      const double f = a[k][c];
      for (std::size_t m = 0; m < 2 * n; ++m) a[k][m] -= f * a[c][m];
    }
  }
  double sr = 0, sq = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double q = a[i][n + j] / std::sqrt(a[i][n + i] * a[j][n + j]);
      sr += r[i][j] * r[i][j];
      sq += q * q;
    }
  return sr / (sr + sq);
}

}  // namespace checks
