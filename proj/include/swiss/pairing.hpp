#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "swiss/core.hpp"
#include "swiss/matching.hpp"

namespace swiss {

/// Lexicographic edge weight: score term first, color term second, pairing
/// system term last.
struct WeightTuple {
  double scoreTerm = 0.0;  // -|s_i - s_j| in points (multiples of 0.5)
  int colorTerm = 0;       // -|cd_i + cd_j|
  double piTerm = 0.0;

  auto operator<=>(const WeightTuple&) const = default;
  WeightTuple& operator+=(const WeightTuple& o) {
    scoreTerm += o.scoreTerm;
    colorTerm += o.colorTerm;
    piTerm += o.piTerm;
    return *this;
  }
};

/// Scalar encoding of WeightTuple. Valid when
///   scoreFactor * 0.5 > colorFactor * maxColorSum + maxAbsPi  and
///   colorFactor > maxAbsPi,
/// so that tuples differing in the first or second component keep their order.
struct EncodingParams {
  double scoreFactor = 10000.0;
  double colorFactor = 100.0;
  double maxColorSum = 4.0;  // 2 * beta
  double maxAbsPi = 0.0;

  bool valid() const noexcept;
  /// Throws EncodingOverflow when the invariants fail.
  void validate() const;

  /// Defaults (10000, 100) when they satisfy the invariants, otherwise the
  /// smallest powers of ten that do.
  static EncodingParams forBounds(double maxColorSum, double maxAbsPi);
};

/// Throws EncodingOverflow when `params` is invalid or the tuple lies outside
/// the bounds the params were validated for.
double encodeWeight(const WeightTuple& tuple, const EncodingParams& params);

struct EngineOptions {
  /// Exponent of the Burstein and Dutch pi terms; must be > 1.
  double exponent = 1.01;
  /// Fixed encoding; when absent the engine derives one from the graph bounds.
  std::optional<EncodingParams> encoding;
  /// Relax the color condition when no perfect matching exists otherwise.
  bool allowFallback = true;
};

/// Upper bound of |pi| for `system` on a graph with `vertexCount` vertices.
double maxAbsPi(PairingSystem system, std::size_t vertexCount, double exponent = 1.01);

/// Lowest ranked player without a bye when the roster is odd.
/// Throws AllPlayersHadBye when every player already received one.
std::optional<PlayerId> selectBye(const TournamentState& state);

/// Pi term for a pair of eligible players. Ranks and score groups are taken
/// over the players that take part in the round (the bye recipient excluded).
double piWeight(PairingSystem system, const PlayerId& a, const PlayerId& b,
                const TournamentState& state, Rng& rng, double exponent = 1.01);

struct PairingEdge {
  std::size_t u = 0;  // index into PairingGraph::vertices
  std::size_t v = 0;
  WeightTuple weight;
  double scalar = 0.0;
  bool colorViolation = false;  // only present in fallback graphs
};

struct PairingGraph {
  /// Eligible players, best rank first.
  std::vector<PlayerId> vertices;
  std::vector<PairingEdge> edges;
  EncodingParams encoding;

  WeightedGraph toWeightedGraph() const;
};

/// Per-round view used to evaluate pi terms: rank, score group and position of
/// each eligible player.
struct RoundContext {
  std::vector<std::size_t> playerIndex;  // vertex -> index in TournamentState::players
  std::vector<int> rank;                 // 1-based rank among eligible players
  std::vector<int> groupSize;
  std::vector<int> groupPosition;  // 0-based position inside the score group
  std::vector<int> groupId;
};

RoundContext makeRoundContext(const TournamentState& state, const std::optional<PlayerId>& bye);

/// Pi term on a prepared context (vertex indices).
double piTerm(PairingSystem system, const RoundContext& ctx, std::size_t a, std::size_t b,
              Rng& rng, double exponent = 1.01);

/// Custom pi term over vertex indices, used for analytical pairings.
using PiFunction = std::function<double(std::size_t, std::size_t)>;

/// Edges satisfying (1) the players have not met and (2) |cd_i + cd_j| < 2*beta,
/// each with its weight tuple and scalar encoding. The bye recipient is removed
/// before the graph is built.
PairingGraph buildPairingGraph(const TournamentState& state, PairingSystem system, double beta,
                               Rng& rng, const EngineOptions& options = {});

/// Same construction with an arbitrary pi function; `bye` names the player
/// excluded from the graph. When `colorFallback` is set, edges failing the
/// color condition are kept and flagged.
PairingGraph buildPairingGraph(const TournamentState& state, double beta,
                               const std::optional<PlayerId>& bye, const PiFunction& pi,
                               double maxAbsPi, const std::optional<EncodingParams>& encoding,
                               bool colorFallback = false);

struct Board {
  PlayerId white;
  PlayerId black;
  bool operator==(const Board&) const = default;
};

struct Pairing {
  int round = 1;
  std::vector<Board> boards;
  std::optional<PlayerId> bye;
  /// Indices into `boards` whose players had different scores.
  std::vector<std::size_t> floats;
  bool fallbackUsed = false;
  bool operator==(const Pairing&) const = default;
};

/// Lower color difference plays white; equal color differences are decided by
/// a coin flip from `rng`.
std::pair<PlayerId, PlayerId> assignColors(const PlayerId& a, const PlayerId& b,
                                           const TournamentState& state, Rng& rng);

/// Full round pairing using the state's system and beta.
Pairing computePairing(const TournamentState& state, Rng& rng, const EngineOptions& options = {});
Pairing computePairing(const TournamentState& state, PairingSystem system, double beta, Rng& rng,
                       const EngineOptions& options = {});

/// Maximizes total true-strength gap subject to the same score-group and
/// color priorities (pi = |str_i - str_j|). Returns the matched vertex pairs as
/// player ids; used as the denominator of the normalized strength difference.
std::vector<std::pair<PlayerId, PlayerId>> maxStrengthGapPairing(
    const TournamentState& state, const std::optional<PlayerId>& bye,
    const std::function<double(const PlayerId&)>& strengthOf);

}  // namespace swiss
