#include "phishpond/game.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "phishpond/error.hpp"

namespace phishpond {

void GameConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(Errc::InvalidConfig, why); };
  if (lives_start <= 0) fail("lives_start must be positive");
  if (time_start <= 0) fail("time_start must be positive");
  if (help_cost <= 0) fail("help_cost must be positive");
  if (help_cost > time_start) fail("help_cost exceeds time_start");
  if (legit_count <= 0 || phish_count <= 0) fail("round counts must be positive");
  if (legit_count + phish_count != rounds_total) fail("legit_count + phish_count != rounds_total");
  if (points_per_correct <= 0) fail("points_per_correct must be positive");
}

const WormRound* GameState::current_round() const {
  if (round_index < 0 || static_cast<std::size_t>(round_index) >= plan.size()) return nullptr;
  return &plan[static_cast<std::size_t>(round_index)];
}

std::string_view to_string(GameStatus status) {
  switch (status) {
    case GameStatus::InProgress: return "InProgress";
    case GameStatus::Completed: return "Completed";
    case GameStatus::OutOfLives: return "OutOfLives";
    case GameStatus::TimeUp: return "TimeUp";
  }
  return "Unknown";
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Correct: return "Correct";
    case OutcomeKind::WrongLostLife: return "WrongLostLife";
    case OutcomeKind::HelpGiven: return "HelpGiven";
    case OutcomeKind::TimeAdvanced: return "TimeAdvanced";
    case OutcomeKind::Terminal: return "Terminal";
  }
  return "Unknown";
}

std::string_view to_string(PlayerAction::Kind kind) {
  switch (kind) {
    case PlayerAction::Kind::Eat: return "eat";
    case PlayerAction::Kind::Avoid: return "avoid";
    case PlayerAction::Kind::RequestHelp: return "help";
    case PlayerAction::Kind::Tick: return "tick";
  }
  return "unknown";
}

GameStatus game_status_from_string(std::string_view s) {
  for (auto st : {GameStatus::InProgress, GameStatus::Completed, GameStatus::OutOfLives,
                  GameStatus::TimeUp})
    if (to_string(st) == s) return st;
  throw Error(Errc::InvalidData, "unknown status '" + std::string(s) + "'");
}

OutcomeKind outcome_kind_from_string(std::string_view s) {
  for (auto k : {OutcomeKind::Correct, OutcomeKind::WrongLostLife, OutcomeKind::HelpGiven,
                 OutcomeKind::TimeAdvanced, OutcomeKind::Terminal})
    if (to_string(k) == s) return k;
  throw Error(Errc::InvalidData, "unknown outcome '" + std::string(s) + "'");
}

PlayerAction::Kind action_kind_from_string(std::string_view s) {
  for (auto k : {PlayerAction::Kind::Eat, PlayerAction::Kind::Avoid,
                 PlayerAction::Kind::RequestHelp, PlayerAction::Kind::Tick})
    if (to_string(k) == s) return k;
  throw Error(Errc::BadAction, "unknown action '" + std::string(s) + "'");
}

std::string_view status_message(GameStatus status) {
  switch (status) {
    case GameStatus::InProgress: return "";
    case GameStatus::Completed: return "Game Over";
    case GameStatus::OutOfLives: return "Out of Lives";
    case GameStatus::TimeUp: return "Your time is up";
  }
  return "";
}

namespace {

// std::shuffle and the std distributions are implementation-defined, so plans
// would differ between standard libraries. mt19937_64 output is not.
class SeededShuffler {
 public:
  explicit SeededShuffler(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Terminal precedence: TimeUp, then OutOfLives, then Completed.
void resolve_terminal(GameState& s) {
  if (s.time_remaining <= 0) {
    s.time_remaining = 0;
    s.status = GameStatus::TimeUp;
  } else if (s.lives <= 0) {
    s.status = GameStatus::OutOfLives;
  } else if (s.round_index >= s.config.rounds_total) {
    s.status = GameStatus::Completed;
  }
}

}  // namespace

GameState new_session(const GameConfig& config, std::span<const WormRound> pool,
                      std::uint64_t seed, const BrandLexicon& lexicon) {
  config.validate();
  std::vector<WormRound> legit;
  std::vector<WormRound> phish;
  for (const auto& round : pool) {
    if (round.difficulty < 1 || round.difficulty > 5)
      throw Error(Errc::InvalidData, "difficulty out of range for " + round.corpus_id);
    (round.truth == Truth::Legit ? legit : phish).push_back(round);
  }
  if (legit.size() < static_cast<std::size_t>(config.legit_count) ||
      phish.size() < static_cast<std::size_t>(config.phish_count)) {
    throw Error(Errc::InsufficientCorpus,
                "need " + std::to_string(config.legit_count) + " legit and " +
                    std::to_string(config.phish_count) + " phish rounds, pool has " +
                    std::to_string(legit.size()) + " and " + std::to_string(phish.size()));
  }

  SeededShuffler rng(seed);
  rng.shuffle(legit);
  rng.shuffle(phish);
  GameState state;
  state.plan.assign(legit.begin(), legit.begin() + config.legit_count);
  state.plan.insert(state.plan.end(), phish.begin(), phish.begin() + config.phish_count);
  rng.shuffle(state.plan);
  std::stable_sort(state.plan.begin(), state.plan.end(),
                   [](const WormRound& a, const WormRound& b) { return a.difficulty < b.difficulty; });

  state.help_tips.reserve(state.plan.size());
  for (const auto& round : state.plan) state.help_tips.push_back(tip_for(round, lexicon));

  state.config = config;
  state.seed = seed;
  state.lives = config.lives_start;
  state.time_remaining = config.time_start;
  return state;
}

std::pair<GameState, ActionOutcome> apply_action(const GameState& state, PlayerAction action) {
  if (state.status != GameStatus::InProgress)
    throw Error(Errc::SessionFinished, "session is " + std::string(to_string(state.status)));
  if (action.kind == PlayerAction::Kind::Tick && action.seconds < 1)
    throw Error(Errc::BadAction, "tick must be at least one second");

  GameState next = state;
  ActionOutcome outcome;
  const int round_before = state.round_index;

  switch (action.kind) {
    case PlayerAction::Kind::Eat:
    case PlayerAction::Kind::Avoid: {
      const WormRound& round = *state.current_round();
      const bool judged_legit = action.kind == PlayerAction::Kind::Eat;
      const bool correct = judged_legit == (round.truth == Truth::Legit);
      outcome.resolved = round;
      if (correct) {
        next.score += state.config.points_per_correct;
        ++next.round_index;
        outcome.kind = OutcomeKind::Correct;
        outcome.feedback = kCorrectFeedback;
      } else {
        --next.lives;
        if (state.config.advance_on_error) ++next.round_index;
        outcome.kind = OutcomeKind::WrongLostLife;
        outcome.feedback = kWrongFeedback;
      }
      break;
    }
    case PlayerAction::Kind::RequestHelp:
      next.time_remaining -= state.config.help_cost;
      outcome.kind = OutcomeKind::HelpGiven;
      outcome.tip = state.help_tips[static_cast<std::size_t>(state.round_index)];
      break;
    case PlayerAction::Kind::Tick:
      next.time_remaining -= action.seconds;
      outcome.kind = OutcomeKind::TimeAdvanced;
      break;
  }

  resolve_terminal(next);
  if (action.kind == PlayerAction::Kind::Tick && next.status == GameStatus::TimeUp) {
    outcome.kind = OutcomeKind::Terminal;
    outcome.feedback = status_message(GameStatus::TimeUp);
  }
  outcome.status = next.status;

  next.log.push_back(GameEvent{
      .seq = state.log.size() + 1,
      .action = action,
      .round_index = round_before,
      .outcome = outcome.kind,
      .score = next.score,
      .lives = next.lives,
      .time_remaining = next.time_remaining,
      .game_time = state.config.time_start - next.time_remaining,
  });
  return {std::move(next), std::move(outcome)};
}

SessionSummary summarize(const GameState& state) {
  SessionSummary summary;
  summary.score = state.score;
  summary.mistakes = state.config.lives_start - state.lives;
  summary.helps_used = static_cast<int>(
      std::count_if(state.log.begin(), state.log.end(),
                    [](const GameEvent& e) { return e.outcome == OutcomeKind::HelpGiven; }));
  summary.elapsed = state.config.time_start - state.time_remaining;
  summary.status = state.status;
  return summary;
}

GameState replay(const GameConfig& config, std::span<const WormRound> pool, std::uint64_t seed,
                 std::span<const PlayerAction> actions, const BrandLexicon& lexicon) {
  GameState state = new_session(config, pool, seed, lexicon);
  for (const auto& action : actions) state = apply_action(state, action).first;
  return state;
}

}  // namespace phishpond
