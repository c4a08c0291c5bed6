#pragma once

#include <functional>
#include <span>
#include <vector>

#include "swiss/core.hpp"
#include "swiss/pairing.hpp"

namespace swiss {

struct Ranking {
  std::vector<PlayerId> orderedIds;  // best first
  bool operator==(const Ranking&) const = default;
};

enum class Tiebreak { Buchholz, Elo };

/// Tiebreakers applied after the final score; lot order always decides last.
struct TiebreakConfig {
  std::vector<Tiebreak> chain{Tiebreak::Buchholz, Tiebreak::Elo};
};

/// Sum of the opponents' final scores in half-points. A bye counts as a
/// virtual opponent holding the player's own final score.
int buchholz(const TournamentState& state, const PlayerId& id);

Ranking finalRanking(const TournamentState& state, const TiebreakConfig& config = {});

using StrengthOf = std::function<double(const PlayerId&)>;

/// Reads Player::trueStrength; throws DomainError for players without one.
StrengthOf trueStrengthLookup(const TournamentState& state);

/// Players ordered by strength, strongest first (lot order breaks ties).
Ranking trueStrengthOrder(const TournamentState& state, const StrengthOf& strengthOf);
Ranking trueStrengthOrder(const TournamentState& state);

/// 1 - 4D / (n(n-1)), D the number of discordant pairs.
double kendallTau(const Ranking& a, const Ranking& b);
/// 1 - 6 sum d^2 / (n(n^2-1)), d the position differences.
double spearmanRho(const Ranking& a, const Ranking& b);
/// Relevance n - truePosition (1-based), discount log2(k + 1).
double ndcg(const Ranking& output, const Ranking& trueOrder);

/// Games whose players had different scores at the start of their round.
int floatPairs(const TournamentState& state);

int absoluteColorDifference(const TournamentState& state, int afterRound);
/// acd after rounds 1..roundsPlayed.
std::vector<int> absoluteColorDifferenceByRound(const TournamentState& state);

/// Decisive games won by the strictly weaker player, over all games played.
double paradoxicalProportion(const TournamentState& state, const StrengthOf& strengthOf);

double meanStrengthDifference(const Pairing& pairing, const StrengthOf& strengthOf);

/// Played strength gaps summed over all rounds, divided by the summed gaps of
/// the max-gap pairings of the same states. 1 when every denominator is 0.
double normalizedStrengthDifference(const TournamentState& state, const StrengthOf& strengthOf);

/// Sample Pearson coefficient; DomainError on length mismatch, fewer than two
/// points or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace swiss
