#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "swiss/error.hpp"

namespace swiss {

using PlayerId = std::string;

/// Random source shared by pairing (random pi terms, color coin flips) and the
/// simulator. A fixed engine type keeps seeded runs reproducible.
using Rng = std::mt19937_64;

enum class PairingSystem { Dutch, Burstein, Monrad, Random, Random2 };

/// Fixed reporting order used by `--systems all` and summaries.
inline constexpr std::array<PairingSystem, 5> kAllSystems{
    PairingSystem::Dutch, PairingSystem::Burstein, PairingSystem::Monrad,
    PairingSystem::Random, PairingSystem::Random2};

std::string_view to_string(PairingSystem system) noexcept;
PairingSystem parsePairingSystem(std::string_view text);

enum class GameResult { WhiteWin, Draw, BlackWin };

std::string_view to_string(GameResult result) noexcept;
/// Accepts "1-0", "1/2", "½", "0-1" and the enum names.
GameResult parseGameResult(std::string_view text);

struct Player {
  PlayerId id;
  std::string name;
  int elo = 0;
  std::optional<double> trueStrength;  // simulation only
  int lotOrder = 0;
};

struct PlayerState {
  int scoreHalfPoints = 0;
  int colorDiff = 0;
  std::set<PlayerId> opponents;
  bool byeReceived = false;
  int whiteCount = 0;
  int blackCount = 0;

  double points() const noexcept { return scoreHalfPoints / 2.0; }
  bool operator==(const PlayerState&) const = default;
};

struct Game {
  PlayerId white;
  PlayerId black;
  GameResult result = GameResult::Draw;
  bool operator==(const Game&) const = default;
};

struct Bye {
  PlayerId player;
  bool operator==(const Bye&) const = default;
};

struct MatchRecord {
  int round = 1;
  std::variant<Game, Bye> kind;

  static MatchRecord game(int round, PlayerId white, PlayerId black, GameResult result) {
    return {round, Game{std::move(white), std::move(black), result}};
  }
  static MatchRecord bye(int round, PlayerId player) { return {round, Bye{std::move(player)}}; }

  bool isGame() const noexcept { return std::holds_alternative<Game>(kind); }
  bool operator==(const MatchRecord&) const = default;
};

/// Immutable snapshot of a tournament. All transitions go through
/// applyResult/applyResults and produce a new value.
class TournamentState {
 public:
  TournamentState() = default;

  /// Validates the roster: unique non-empty ids, lotOrder a permutation of 1..n.
  static TournamentState create(std::string name, PairingSystem system, double beta,
                                std::vector<Player> players);

  /// Builds the state by applying `history` in order.
  static TournamentState replay(std::string name, PairingSystem system, double beta,
                                std::vector<Player> players,
                                std::span<const MatchRecord> history);

  const std::string& name() const noexcept { return name_; }
  PairingSystem system() const noexcept { return system_; }
  double beta() const noexcept { return beta_; }
  int roundsPlayed() const noexcept { return roundsPlayed_; }
  std::size_t playerCount() const noexcept { return players_.size(); }

  const std::vector<Player>& players() const noexcept { return players_; }
  const std::vector<PlayerState>& states() const noexcept { return states_; }
  const std::vector<MatchRecord>& history() const noexcept { return history_; }

  bool contains(const PlayerId& id) const { return index_.count(id) != 0; }
  std::size_t indexOf(const PlayerId& id) const;
  const Player& player(const PlayerId& id) const { return players_[indexOf(id)]; }
  const PlayerState& state(const PlayerId& id) const { return states_[indexOf(id)]; }

  /// Same roster and history under a different pairing system or beta.
  TournamentState withParameters(PairingSystem system, double beta) const;
  /// Replays only the records of rounds strictly before `round`.
  TournamentState truncatedBefore(int round) const;

  friend TournamentState applyResults(const TournamentState& state,
                                      std::span<const MatchRecord> records);

 private:
  void applyInPlace(const MatchRecord& record);

  std::string name_;
  PairingSystem system_ = PairingSystem::Dutch;
  double beta_ = 2.0;
  std::vector<Player> players_;
  std::vector<PlayerState> states_;
  std::unordered_map<PlayerId, std::size_t> index_;
  std::vector<MatchRecord> history_;
  int roundsPlayed_ = 0;
};

TournamentState applyResult(const TournamentState& state, const MatchRecord& record);
/// Applies several records with a single copy of the state.
TournamentState applyResults(const TournamentState& state, std::span<const MatchRecord> records);

/// Player indices ordered by score (desc), Elo (desc), lotOrder (asc).
std::vector<std::size_t> rankedIndices(const TournamentState& state);
std::vector<PlayerId> currentRanks(const TournamentState& state);
std::vector<std::vector<PlayerId>> scoreGroups(const TournamentState& state);

/// Lot orders 1..n shuffled with `rng`.
std::vector<int> drawLots(std::size_t n, Rng& rng);

}  // namespace swiss
