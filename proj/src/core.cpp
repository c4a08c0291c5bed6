#include "swiss/core.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace swiss {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RepeatedPairing: return "RepeatedPairing";
    case ErrorCode::DuplicateBye: return "DuplicateBye";
    case ErrorCode::UnknownPlayer: return "UnknownPlayer";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::InvalidRoster: return "InvalidRoster";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::NoPerfectMatching: return "NoPerfectMatching";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::AllPlayersHadBye: return "AllPlayersHadBye";
    case ErrorCode::EncodingOverflow: return "EncodingOverflow";
    case ErrorCode::NoLegalPairing: return "NoLegalPairing";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(PairingSystem system) noexcept {
  switch (system) {
    case PairingSystem::Dutch: return "Dutch";
    case PairingSystem::Burstein: return "Burstein";
    case PairingSystem::Monrad: return "Monrad";
    case PairingSystem::Random: return "Random";
    case PairingSystem::Random2: return "Random2";
  }
  return "Dutch";
}

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

PairingSystem parsePairingSystem(std::string_view text) {
  const std::string key = lower(text);
  for (PairingSystem system : kAllSystems) {
    if (lower(to_string(system)) == key) return system;
  }
  fail(ErrorCode::ParseError, "unknown pairing system '" + std::string(text) + "'");
}

std::string_view to_string(GameResult result) noexcept {
  switch (result) {
    case GameResult::WhiteWin: return "1-0";
    case GameResult::Draw: return "1/2";
    case GameResult::BlackWin: return "0-1";
  }
  return "1/2";
}

GameResult parseGameResult(std::string_view text) {
  const std::string key = lower(text);
  if (key == "1-0" || key == "whitewin" || key == "white") return GameResult::WhiteWin;
  if (key == "0-1" || key == "blackwin" || key == "black") return GameResult::BlackWin;
  if (key == "1/2" || key == "1/2-1/2" || key == "\xc2\xbd" || key == "draw" || key == "=")
    return GameResult::Draw;
  fail(ErrorCode::ParseError, "unknown game result '" + std::string(text) + "'");
}

TournamentState TournamentState::create(std::string name, PairingSystem system, double beta,
                                        std::vector<Player> players) {
  if (!(beta > 0.0)) fail(ErrorCode::InvalidRoster, "beta must be positive");
  TournamentState state;
  state.name_ = std::move(name);
  state.system_ = system;
  state.beta_ = beta;

  std::vector<int> lots;
  lots.reserve(players.size());
  for (std::size_t i = 0; i < players.size(); ++i) {
    const Player& p = players[i];
    if (p.id.empty()) fail(ErrorCode::InvalidRoster, "player id must not be empty");
    if (!state.index_.emplace(p.id, i).second)
      fail(ErrorCode::InvalidRoster, "duplicate player id '" + p.id + "'");
    lots.push_back(p.lotOrder);
  }
  std::sort(lots.begin(), lots.end());
  for (std::size_t i = 0; i < lots.size(); ++i) {
    if (lots[i] != static_cast<int>(i + 1))
      fail(ErrorCode::InvalidRoster, "lotOrder values must be a permutation of 1..n");
  }
  state.players_ = std::move(players);
  state.states_.assign(state.players_.size(), PlayerState{});
  return state;
}

TournamentState TournamentState::replay(std::string name, PairingSystem system, double beta,
                                        std::vector<Player> players,
                                        std::span<const MatchRecord> history) {
  TournamentState state = create(std::move(name), system, beta, std::move(players));
  for (const MatchRecord& record : history) state.applyInPlace(record);
  return state;
}

std::size_t TournamentState::indexOf(const PlayerId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::UnknownPlayer, "unknown player '" + id + "'");
  return it->second;
}

TournamentState TournamentState::withParameters(PairingSystem system, double beta) const {
  if (!(beta > 0.0)) fail(ErrorCode::InvalidConfig, "beta must be positive");
  TournamentState copy = *this;
  copy.system_ = system;
  copy.beta_ = beta;
  return copy;
}

TournamentState TournamentState::truncatedBefore(int round) const {
  std::vector<MatchRecord> kept;
  for (const MatchRecord& record : history_) {
    if (record.round < round) kept.push_back(record);
  }
  return replay(name_, system_, beta_, players_, kept);
}

void TournamentState::applyInPlace(const MatchRecord& record) {
  if (record.round != roundsPlayed_ && record.round != roundsPlayed_ + 1)
    fail(ErrorCode::InvalidRecord, "record for round " + std::to_string(record.round) +
                                       " cannot follow round " + std::to_string(roundsPlayed_));
  if (record.round < 1) fail(ErrorCode::InvalidRecord, "rounds start at 1");

  auto playsInRound = [&](const PlayerId& id) {
    // history is ordered by round, so only the tail can belong to this round
    for (auto it = history_.rbegin(); it != history_.rend() && it->round == record.round; ++it) {
      const MatchRecord& r = *it;
      if (const auto* g = std::get_if<Game>(&r.kind)) {
        if (g->white == id || g->black == id) return true;
      } else if (std::get<Bye>(r.kind).player == id) {
        return true;
      }
    }
    return false;
  };

  if (const auto* game = std::get_if<Game>(&record.kind)) {
    const std::size_t w = indexOf(game->white);
    const std::size_t b = indexOf(game->black);
    if (w == b) fail(ErrorCode::InvalidRecord, "a player cannot play against themselves");
    if (states_[w].opponents.count(game->black))
      fail(ErrorCode::RepeatedPairing, game->white + " and " + game->black + " already played");
    if (playsInRound(game->white) || playsInRound(game->black))
      fail(ErrorCode::InvalidRecord, "player already scheduled in round " +
                                         std::to_string(record.round));
    PlayerState& white = states_[w];
    PlayerState& black = states_[b];
    switch (game->result) {
      case GameResult::WhiteWin: white.scoreHalfPoints += 2; break;
      case GameResult::Draw:
        white.scoreHalfPoints += 1;
        black.scoreHalfPoints += 1;
        break;
      case GameResult::BlackWin: black.scoreHalfPoints += 2; break;
    }
    white.colorDiff += 1;
    white.whiteCount += 1;
    black.colorDiff -= 1;
    black.blackCount += 1;
    white.opponents.insert(game->black);
    black.opponents.insert(game->white);
  } else {
    const Bye& bye = std::get<Bye>(record.kind);
    const std::size_t p = indexOf(bye.player);
    if (states_[p].byeReceived)
      fail(ErrorCode::DuplicateBye, bye.player + " already received a bye");
    if (playsInRound(bye.player))
      fail(ErrorCode::InvalidRecord, "player already scheduled in round " +
                                         std::to_string(record.round));
    states_[p].scoreHalfPoints += 2;
    states_[p].byeReceived = true;
  }
  history_.push_back(record);
  roundsPlayed_ = record.round;
}

TournamentState applyResult(const TournamentState& state, const MatchRecord& record) {
  return applyResults(state, std::span<const MatchRecord>(&record, 1));
}

TournamentState applyResults(const TournamentState& state, std::span<const MatchRecord> records) {
  TournamentState next = state;
  for (const MatchRecord& record : records) next.applyInPlace(record);
  return next;
}

std::vector<std::size_t> rankedIndices(const TournamentState& state) {
  std::vector<std::size_t> order(state.playerCount());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& players = state.players();
  const auto& states = state.states();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (states[a].scoreHalfPoints != states[b].scoreHalfPoints)
      return states[a].scoreHalfPoints > states[b].scoreHalfPoints;
    if (players[a].elo != players[b].elo) return players[a].elo > players[b].elo;
    return players[a].lotOrder < players[b].lotOrder;
  });
  return order;
}

std::vector<PlayerId> currentRanks(const TournamentState& state) {
  std::vector<PlayerId> ids;
  ids.reserve(state.playerCount());
  for (std::size_t i : rankedIndices(state)) ids.push_back(state.players()[i].id);
  return ids;
}

std::vector<std::vector<PlayerId>> scoreGroups(const TournamentState& state) {
  std::vector<std::vector<PlayerId>> groups;
  int current = -1;
  for (std::size_t i : rankedIndices(state)) {
    const int score = state.states()[i].scoreHalfPoints;
    if (groups.empty() || score != current) {
      groups.emplace_back();
      current = score;
    }
    groups.back().push_back(state.players()[i].id);
  }
  return groups;
}

std::vector<int> drawLots(std::size_t n, Rng& rng) {
  std::vector<int> lots(n);
  std::iota(lots.begin(), lots.end(), 1);
  std::shuffle(lots.begin(), lots.end(), rng);
  return lots;
}

}  // namespace swiss
