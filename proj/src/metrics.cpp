#include "swiss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace swiss {

int buchholz(const TournamentState& state, const PlayerId& id) {
  const PlayerState& own = state.state(id);
  int total = 0;
  for (const PlayerId& opp : own.opponents) total += state.state(opp).scoreHalfPoints;
  if (own.byeReceived) total += own.scoreHalfPoints;
  return total;
}

Ranking finalRanking(const TournamentState& state, const TiebreakConfig& config) {
  const auto& players = state.players();
  const auto& states = state.states();
  std::vector<int> buch(players.size(), 0);
  for (std::size_t i = 0; i < players.size(); ++i) buch[i] = buchholz(state, players[i].id);

  std::vector<std::size_t> order(players.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (states[a].scoreHalfPoints != states[b].scoreHalfPoints)
      return states[a].scoreHalfPoints > states[b].scoreHalfPoints;
    for (Tiebreak t : config.chain) {
      if (t == Tiebreak::Buchholz && buch[a] != buch[b]) return buch[a] > buch[b];
      if (t == Tiebreak::Elo && players[a].elo != players[b].elo)
        return players[a].elo > players[b].elo;
    }
    return players[a].lotOrder < players[b].lotOrder;
  });
  Ranking r;
  for (std::size_t i : order) r.orderedIds.push_back(players[i].id);
  return r;
}

StrengthOf trueStrengthLookup(const TournamentState& state) {
  std::unordered_map<PlayerId, double> strengths;
  for (const Player& p : state.players()) {
    if (!p.trueStrength) fail(ErrorCode::DomainError, "player '" + p.id + "' has no true strength");
    strengths.emplace(p.id, *p.trueStrength);
  }
  return [strengths = std::move(strengths)](const PlayerId& id) {
    auto it = strengths.find(id);
    if (it == strengths.end()) fail(ErrorCode::DomainError, "no strength for '" + id + "'");
    return it->second;
  };
}

Ranking trueStrengthOrder(const TournamentState& state, const StrengthOf& strengthOf) {
  const auto& players = state.players();
  std::vector<std::pair<double, int>> keys;
  for (const Player& p : players) keys.emplace_back(strengthOf(p.id), p.lotOrder);
  std::vector<std::size_t> order(players.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a].first != keys[b].first) return keys[a].first > keys[b].first;
    return keys[a].second < keys[b].second;
  });
  Ranking r;
  for (std::size_t i : order) r.orderedIds.push_back(players[i].id);
  return r;
}

Ranking trueStrengthOrder(const TournamentState& state) {
  return trueStrengthOrder(state, trueStrengthLookup(state));
}

namespace {

// Position of each id of `a` inside `b`.
std::vector<std::size_t> positionsIn(const Ranking& a, const Ranking& b) {
  if (a.orderedIds.size() != b.orderedIds.size())
    fail(ErrorCode::DomainError, "rankings cover different player sets");
  std::unordered_map<PlayerId, std::size_t> pos;
  for (std::size_t i = 0; i < b.orderedIds.size(); ++i) {
    if (!pos.emplace(b.orderedIds[i], i).second)
      fail(ErrorCode::DomainError, "duplicate id in ranking");
  }
  std::vector<std::size_t> out;
  out.reserve(a.orderedIds.size());
  std::vector<bool> used(b.orderedIds.size(), false);
  for (const PlayerId& id : a.orderedIds) {
    auto it = pos.find(id);
    if (it == pos.end() || used[it->second])
      fail(ErrorCode::DomainError, "rankings cover different player sets");
    used[it->second] = true;
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

double kendallTau(const Ranking& a, const Ranking& b) {
  const auto pos = positionsIn(a, b);
  const std::size_t n = pos.size();
  if (n < 2) fail(ErrorCode::DomainError, "need at least two players");
  long long discordant = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) discordant += pos[i] > pos[j];
  return 1.0 - 4.0 * static_cast<double>(discordant) / (double(n) * double(n - 1));
}

double spearmanRho(const Ranking& a, const Ranking& b) {
  const auto pos = positionsIn(a, b);
  const std::size_t n = pos.size();
  if (n < 2) fail(ErrorCode::DomainError, "need at least two players");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = double(i) - double(pos[i]);
    sum += d * d;
  }
  return 1.0 - 6.0 * sum / (double(n) * (double(n) * double(n) - 1.0));
}

double ndcg(const Ranking& output, const Ranking& trueOrder) {
  const auto pos = positionsIn(output, trueOrder);
  const std::size_t n = pos.size();
  if (n < 2) fail(ErrorCode::DomainError, "need at least two players");
  double dcg = 0.0;
  double ideal = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double discount = std::log2(double(k) + 2.0);
    dcg += double(n - 1 - pos[k]) / discount;
    ideal += double(n - 1 - k) / discount;
  }
  return dcg / ideal;
}

namespace {

// Calls f(round, records of that round, scores at the start of the round).
template <typename F>
void forEachRound(const TournamentState& state, F&& f) {
  std::vector<int> scores(state.playerCount(), 0);
  const auto& history = state.history();
  std::size_t i = 0;
  while (i < history.size()) {
    const int round = history[i].round;
    std::size_t j = i;
    while (j < history.size() && history[j].round == round) ++j;
    std::span<const MatchRecord> records(history.data() + i, j - i);
    f(round, records, scores);
    for (const MatchRecord& rec : records) {
      if (const Game* g = std::get_if<Game>(&rec.kind)) {
        const std::size_t w = state.indexOf(g->white);
        const std::size_t b = state.indexOf(g->black);
        scores[w] += g->result == GameResult::WhiteWin ? 2 : g->result == GameResult::Draw ? 1 : 0;
        scores[b] += g->result == GameResult::BlackWin ? 2 : g->result == GameResult::Draw ? 1 : 0;
      } else {
        scores[state.indexOf(std::get<Bye>(rec.kind).player)] += 2;
      }
    }
    i = j;
  }
}

}  // namespace

int floatPairs(const TournamentState& state) {
  int count = 0;
  forEachRound(state, [&](int, std::span<const MatchRecord> records, const std::vector<int>& scores) {
    for (const MatchRecord& rec : records) {
      if (const Game* g = std::get_if<Game>(&rec.kind)) {
        count += scores[state.indexOf(g->white)] != scores[state.indexOf(g->black)];
      }
    }
  });
  return count;
}

std::vector<int> absoluteColorDifferenceByRound(const TournamentState& state) {
  std::vector<int> colors(state.playerCount(), 0);
  std::vector<int> out(static_cast<std::size_t>(state.roundsPlayed()), 0);
  const auto& history = state.history();
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (const Game* g = std::get_if<Game>(&history[i].kind)) {
      ++colors[state.indexOf(g->white)];
      --colors[state.indexOf(g->black)];
    }
    const bool lastOfRound = i + 1 == history.size() || history[i + 1].round != history[i].round;
    if (lastOfRound) {
      int acd = 0;
      for (int c : colors) acd += std::abs(c);
      out[static_cast<std::size_t>(history[i].round - 1)] = acd;
    }
  }
  return out;
}

int absoluteColorDifference(const TournamentState& state, int afterRound) {
  if (afterRound < 0 || afterRound > state.roundsPlayed())
    fail(ErrorCode::DomainError, "round " + std::to_string(afterRound) + " has not been played");
  if (afterRound == 0) return 0;
  return absoluteColorDifferenceByRound(state)[static_cast<std::size_t>(afterRound - 1)];
}

double paradoxicalProportion(const TournamentState& state, const StrengthOf& strengthOf) {
  int games = 0;
  int paradoxical = 0;
  for (const MatchRecord& rec : state.history()) {
    const Game* g = std::get_if<Game>(&rec.kind);
    if (!g) continue;
    ++games;
    const double w = strengthOf(g->white);
    const double b = strengthOf(g->black);
    if ((g->result == GameResult::WhiteWin && w < b) ||
        (g->result == GameResult::BlackWin && b < w))
      ++paradoxical;
  }
  return games == 0 ? 0.0 : double(paradoxical) / double(games);
}

double meanStrengthDifference(const Pairing& pairing, const StrengthOf& strengthOf) {
  if (pairing.boards.empty()) return 0.0;
  double total = 0.0;
  for (const Board& b : pairing.boards) total += std::abs(strengthOf(b.white) - strengthOf(b.black));
  return total / double(pairing.boards.size());
}

double normalizedStrengthDifference(const TournamentState& state, const StrengthOf& strengthOf) {
  double actual = 0.0;
  double maximum = 0.0;
  for (int round = 1; round <= state.roundsPlayed(); ++round) {
    const TournamentState before = state.truncatedBefore(round);
    std::optional<PlayerId> bye;
    for (const MatchRecord& rec : state.history()) {
      if (rec.round != round) continue;
      if (const Game* g = std::get_if<Game>(&rec.kind)) {
        actual += std::abs(strengthOf(g->white) - strengthOf(g->black));
      } else {
        bye = std::get<Bye>(rec.kind).player;
      }
    }
    for (const auto& [a, b] : maxStrengthGapPairing(before, bye, strengthOf))
      maximum += std::abs(strengthOf(a) - strengthOf(b));
  }
  if (maximum == 0.0) return 1.0;
  return actual / maximum;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorCode::DomainError, "series differ in length");
  if (xs.size() < 2) fail(ErrorCode::DomainError, "need at least two points");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) fail(ErrorCode::DomainError, "zero variance");
  const double n = double(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::DomainError, "zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace swiss
