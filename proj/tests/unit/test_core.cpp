#include "doctest.h"

#include "swiss/core.hpp"

using namespace swiss;

namespace {

std::vector<Player> roster(std::initializer_list<int> elos) {
  std::vector<Player> out;
  int i = 1;
  for (int elo : elos) {
    out.push_back({"p" + std::to_string(i), "P" + std::to_string(i), elo, std::nullopt, i});
    ++i;
  }
  return out;
}

TournamentState fresh(std::initializer_list<int> elos) {
  return TournamentState::create("t", PairingSystem::Dutch, 2.0, roster(elos));
}

ErrorCode codeOf(auto&& f) {
  try {
    f();
  } catch (const SwissError& e) {
    return e.code();
  }
  FAIL("expected a SwissError");
  return ErrorCode::InvariantViolation;
}

}  // namespace

TEST_CASE("white win updates scores and colors") {
  auto s = applyResult(fresh({1800, 1700}), MatchRecord::game(1, "p1", "p2", GameResult::WhiteWin));
  CHECK(s.state("p1").scoreHalfPoints == 2);
  CHECK(s.state("p1").colorDiff == 1);
  CHECK(s.state("p2").scoreHalfPoints == 0);
  CHECK(s.state("p2").colorDiff == -1);
  CHECK(s.state("p1").opponents.count("p2") == 1);
  CHECK(s.state("p2").opponents.count("p1") == 1);
  CHECK(s.roundsPlayed() == 1);
}

TEST_CASE("draw gives half a point each") {
  auto s = applyResult(fresh({1800, 1700}), MatchRecord::game(1, "p2", "p1", GameResult::Draw));
  CHECK(s.state("p1").scoreHalfPoints == 1);
  CHECK(s.state("p2").scoreHalfPoints == 1);
  CHECK(s.state("p2").whiteCount == 1);
  CHECK(s.state("p1").blackCount == 1);
}

TEST_CASE("bye adds a point and keeps the color difference") {
  auto s = applyResult(fresh({1800, 1700, 1600}), MatchRecord::bye(1, "p3"));
  CHECK(s.state("p3").scoreHalfPoints == 2);
  CHECK(s.state("p3").colorDiff == 0);
  CHECK(s.state("p3").byeReceived);
}

TEST_CASE("record errors") {
  auto s = fresh({1800, 1700, 1600, 1500});
  s = applyResult(s, MatchRecord::game(1, "p1", "p2", GameResult::WhiteWin));
  s = applyResult(s, MatchRecord::game(1, "p3", "p4", GameResult::WhiteWin));
  CHECK(codeOf([&] { applyResult(s, MatchRecord::game(2, "p2", "p1", GameResult::Draw)); }) ==
        ErrorCode::RepeatedPairing);
  CHECK(codeOf([&] { applyResult(s, MatchRecord::game(2, "p1", "zz", GameResult::Draw)); }) ==
        ErrorCode::UnknownPlayer);
  CHECK(codeOf([&] { applyResult(s, MatchRecord::game(3, "p1", "p3", GameResult::Draw)); }) ==
        ErrorCode::InvalidRecord);
  CHECK(codeOf([&] { applyResult(s, MatchRecord::game(1, "p1", "p3", GameResult::Draw)); }) ==
        ErrorCode::InvalidRecord);
  auto b = applyResult(fresh({1, 2, 3}), MatchRecord::bye(1, "p1"));
  b = applyResult(b, MatchRecord::game(1, "p2", "p3", GameResult::Draw));
  CHECK(codeOf([&] { applyResult(b, MatchRecord::bye(2, "p1")); }) == ErrorCode::DuplicateBye);
}

TEST_CASE("roster validation") {
  auto players = roster({1800, 1700});
  players[1].lotOrder = 1;
  CHECK(codeOf([&] { TournamentState::create("t", PairingSystem::Dutch, 2.0, players); }) ==
        ErrorCode::InvalidRoster);
  players = roster({1800, 1700});
  players[1].id = "p1";
  CHECK(codeOf([&] { TournamentState::create("t", PairingSystem::Dutch, 2.0, players); }) ==
        ErrorCode::InvalidRoster);
  CHECK(codeOf([&] { TournamentState::create("t", PairingSystem::Dutch, 0.0, roster({1, 2})); }) ==
        ErrorCode::InvalidRoster);
}

TEST_CASE("ranks: score, then Elo, then lot order") {
  auto s = fresh({1500, 1700, 2200, 1000});
  s = applyResult(s, MatchRecord::game(1, "p1", "p3", GameResult::WhiteWin));
  s = applyResult(s, MatchRecord::game(1, "p2", "p4", GameResult::WhiteWin));
  auto ranks = currentRanks(s);
  CHECK(ranks == std::vector<PlayerId>{"p2", "p1", "p3", "p4"});

  auto players = roster({1800, 1800, 1600});
  players[0].lotOrder = 3;
  players[2].lotOrder = 1;
  auto t = TournamentState::create("t", PairingSystem::Dutch, 2.0, players);
  CHECK(currentRanks(t) == std::vector<PlayerId>{"p2", "p1", "p3"});
}

TEST_CASE("score groups partition the ranking") {
  auto s = fresh({1, 2, 3, 4});
  CHECK(scoreGroups(s).size() == 1);
  s = applyResult(s, MatchRecord::game(1, "p1", "p2", GameResult::Draw));
  s = applyResult(s, MatchRecord::game(1, "p3", "p4", GameResult::WhiteWin));
  auto groups = scoreGroups(s);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0] == std::vector<PlayerId>{"p3"});
  CHECK(groups[1] == std::vector<PlayerId>{"p2", "p1"});
  CHECK(groups[2] == std::vector<PlayerId>{"p4"});
  std::vector<PlayerId> flat;
  for (auto& g : groups) flat.insert(flat.end(), g.begin(), g.end());
  CHECK(flat == currentRanks(s));
}

TEST_CASE("replay reproduces the states") {
  auto s = fresh({1800, 1700, 1600, 1500});
  s = applyResult(s, MatchRecord::game(1, "p1", "p2", GameResult::BlackWin));
  s = applyResult(s, MatchRecord::game(1, "p4", "p3", GameResult::Draw));
  s = applyResult(s, MatchRecord::game(2, "p2", "p4", GameResult::WhiteWin));
  s = applyResult(s, MatchRecord::game(2, "p3", "p1", GameResult::Draw));
  auto r = TournamentState::replay("t", PairingSystem::Dutch, 2.0, s.players(), s.history());
  CHECK(r.states() == s.states());
  CHECK(r.roundsPlayed() == 2);
  int sum = 0;
  for (const auto& st : s.states()) sum += st.colorDiff;
  CHECK(sum == 0);
  auto cut = s.truncatedBefore(2);
  CHECK(cut.roundsPlayed() == 1);
  CHECK(cut.history().size() == 2);
}

TEST_CASE("name parsing") {
  CHECK(parsePairingSystem("burstein") == PairingSystem::Burstein);
  CHECK(parsePairingSystem("RANDOM2") == PairingSystem::Random2);
  CHECK(parseGameResult("1-0") == GameResult::WhiteWin);
  CHECK(parseGameResult("1/2") == GameResult::Draw);
  CHECK(parseGameResult("0-1") == GameResult::BlackWin);
  CHECK(codeOf([] { parsePairingSystem("swiss"); }) == ErrorCode::ParseError);
}

TEST_CASE("lots are a permutation") {
  Rng rng(3);
  auto lots = drawLots(10, rng);
  std::sort(lots.begin(), lots.end());
  for (int i = 0; i < 10; ++i) CHECK(lots[i] == i + 1);
}
