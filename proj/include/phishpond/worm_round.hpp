#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace phishpond {

enum class Truth { Legit, Phish };

std::string_view to_string(Truth truth);
// "Legit" / "Phish"; throws Error(InvalidData) otherwise.
Truth truth_from_string(std::string_view s);

// One worm presented to the player.
struct WormRound {
  std::string corpus_id;
  std::string url;
  Truth truth = Truth::Legit;
  std::optional<std::string> tip;
  int difficulty = 1;

  friend bool operator==(const WormRound&, const WormRound&) = default;
};

}  // namespace phishpond
