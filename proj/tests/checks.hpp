#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phishpond/game.hpp"

namespace checks {

// The three-round configuration used for exhaustive enumeration.
phishpond::GameConfig mini_config(bool advance_on_error);
std::vector<phishpond::WormRound> mini_pool();

struct EnumerationResult {
  std::uint64_t states = 0;
  std::uint64_t terminal_states = 0;
  std::vector<std::string> violations;  // first few only
};

// Depth-first walk over every action sequence (eat, avoid, help, and ticks
// of 60 and 150 s) from a fresh mini session, checking the engine
// invariants after every transition.
EnumerationResult enumerate_mini(bool advance_on_error, std::uint64_t seed = 1);

struct FuzzResult {
  int runs = 0;
  int matched = 0;
  std::vector<std::string> failures;
};

// Random play-throughs on the default corpus, each persisted to a session
// log under root, reloaded, and replayed from its action list.
FuzzResult replay_fuzz(const std::filesystem::path& root, int runs, std::uint64_t base_seed);

// KMO from a correlation matrix via a hand Gauss-Jordan inverse (no Eigen).
double kmo_inverse_oracle(const std::vector<std::vector<double>>& correlation);

}  // namespace checks
