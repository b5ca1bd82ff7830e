#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phishpond/rules.hpp"
#include "phishpond/worm_round.hpp"

namespace phishpond {

struct GameConfig {
  int lives_start = 5;
  int time_start = 600;  // seconds
  int help_cost = 100;   // seconds per help request
  int rounds_total = 10;
  int legit_count = 5;
  int phish_count = 5;
  int points_per_correct = 1;
  bool advance_on_error = true;

  // Throws Error(InvalidConfig) when counts or costs are inconsistent.
  void validate() const;

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

enum class GameStatus { InProgress, Completed, OutOfLives, TimeUp };

struct PlayerAction {
  enum class Kind { Eat, Avoid, RequestHelp, Tick };

  Kind kind = Kind::Eat;
  int seconds = 0;  // Tick only

  static PlayerAction eat() { return {Kind::Eat, 0}; }
  static PlayerAction avoid() { return {Kind::Avoid, 0}; }
  static PlayerAction help() { return {Kind::RequestHelp, 0}; }
  static PlayerAction tick(int seconds) { return {Kind::Tick, seconds}; }

  friend bool operator==(const PlayerAction&, const PlayerAction&) = default;
};

enum class OutcomeKind { Correct, WrongLostLife, HelpGiven, TimeAdvanced, Terminal };

inline constexpr std::string_view kCorrectFeedback = "wow well done";
inline constexpr std::string_view kWrongFeedback = "oh try again";

struct ActionOutcome {
  OutcomeKind kind = OutcomeKind::TimeAdvanced;
  std::string feedback;
  std::optional<std::string> tip;
  GameStatus status = GameStatus::InProgress;
  // Set when the action resolved a round (eat/avoid).
  std::optional<WormRound> resolved;

  friend bool operator==(const ActionOutcome&, const ActionOutcome&) = default;
};

struct GameEvent {
  std::uint64_t seq = 0;
  PlayerAction action;
  int round_index = 0;  // round the action applied to
  OutcomeKind outcome = OutcomeKind::TimeAdvanced;
  int score = 0;
  int lives = 0;
  int time_remaining = 0;
  int game_time = 0;  // game seconds elapsed after the action

  friend bool operator==(const GameEvent&, const GameEvent&) = default;
};

struct GameState {
  GameConfig config;
  std::uint64_t seed = 0;
  std::vector<WormRound> plan;
  // Tip handed out on a help request, one per planned round.
  std::vector<std::string> help_tips;
  int round_index = 0;
  int score = 0;
  int lives = 0;
  int time_remaining = 0;
  GameStatus status = GameStatus::InProgress;
  std::vector<GameEvent> log;

  // Null once every round has been answered.
  const WormRound* current_round() const;

  friend bool operator==(const GameState&, const GameState&) = default;
};

struct SessionSummary {
  int score = 0;
  int mistakes = 0;
  int helps_used = 0;
  int elapsed = 0;
  GameStatus status = GameStatus::InProgress;

  friend bool operator==(const SessionSummary&, const SessionSummary&) = default;
};

std::string_view to_string(GameStatus status);
std::string_view to_string(OutcomeKind kind);
std::string_view to_string(PlayerAction::Kind kind);
GameStatus game_status_from_string(std::string_view s);
OutcomeKind outcome_kind_from_string(std::string_view s);
PlayerAction::Kind action_kind_from_string(std::string_view s);
// Message shown on the end screen for a terminal status.
std::string_view status_message(GameStatus status);

// Seeded selection of legit_count + phish_count rounds from pool, ordered by
// nondecreasing difficulty with ties shuffled. Throws InsufficientCorpus.
GameState new_session(const GameConfig& config, std::span<const WormRound> pool,
                      std::uint64_t seed,
                      const BrandLexicon& lexicon = BrandLexicon::embedded());

// Pure transition. Throws SessionFinished on a terminal state and BadAction
// for a Tick below one second.
std::pair<GameState, ActionOutcome> apply_action(const GameState& state, PlayerAction action);

SessionSummary summarize(const GameState& state);

// Rebuilds a session from its seed and the actions recorded in a log.
GameState replay(const GameConfig& config, std::span<const WormRound> pool, std::uint64_t seed,
                 std::span<const PlayerAction> actions,
                 const BrandLexicon& lexicon = BrandLexicon::embedded());

}  // namespace phishpond
