#include "swiss/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace swiss {

bool EncodingParams::valid() const noexcept {
  return scoreFactor > 0.0 && colorFactor > 0.0 && colorFactor > maxAbsPi &&
         scoreFactor * 0.5 > colorFactor * maxColorSum + maxAbsPi;
}

void EncodingParams::validate() const {
  if (!valid()) {
    fail(ErrorCode::EncodingOverflow,
         "factors (" + std::to_string(scoreFactor) + ", " + std::to_string(colorFactor) +
             ") cannot separate color sums up to " + std::to_string(maxColorSum) +
             " and pi terms up to " + std::to_string(maxAbsPi));
  }
}

namespace {

double smallestPowerOfTenAbove(double bound) {
  double p = 1.0;
  while (!(p > bound)) p *= 10.0;
  return p;
}

}  // namespace

EncodingParams EncodingParams::forBounds(double maxColorSum, double maxAbsPi) {
  EncodingParams params;
  params.maxColorSum = maxColorSum;
  params.maxAbsPi = maxAbsPi;
  if (params.valid()) return params;
  params.colorFactor = smallestPowerOfTenAbove(maxAbsPi);
  params.scoreFactor = smallestPowerOfTenAbove(2.0 * (params.colorFactor * maxColorSum + maxAbsPi));
  return params;
}

double encodeWeight(const WeightTuple& tuple, const EncodingParams& params) {
  params.validate();
  if (tuple.scoreTerm > 0.0 || tuple.colorTerm > 0)
    fail(ErrorCode::EncodingOverflow, "score and color terms must be non-positive");
  if (-tuple.colorTerm > params.maxColorSum || std::abs(tuple.piTerm) > params.maxAbsPi)
    fail(ErrorCode::EncodingOverflow, "weight tuple exceeds the validated bounds");
  return params.scoreFactor * tuple.scoreTerm + params.colorFactor * tuple.colorTerm +
         tuple.piTerm;
}

double maxAbsPi(PairingSystem system, std::size_t vertexCount, double exponent) {
  if (vertexCount < 2) return 1.0;
  const double span = static_cast<double>(vertexCount - 1);
  switch (system) {
    case PairingSystem::Monrad: return span;
    case PairingSystem::Burstein:
    case PairingSystem::Dutch: return std::pow(span, exponent);
    case PairingSystem::Random:
    case PairingSystem::Random2: return 1.0;
  }
  return span;
}

std::optional<PlayerId> selectBye(const TournamentState& state) {
  if (state.playerCount() % 2 == 0) return std::nullopt;
  const auto order = rankedIndices(state);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (!state.states()[*it].byeReceived) return state.players()[*it].id;
  }
  fail(ErrorCode::AllPlayersHadBye, "every player already received a bye");
}

RoundContext makeRoundContext(const TournamentState& state, const std::optional<PlayerId>& bye) {
  RoundContext ctx;
  const std::size_t byeIndex = bye ? state.indexOf(*bye) : std::numeric_limits<std::size_t>::max();
  for (std::size_t i : rankedIndices(state)) {
    if (i != byeIndex) ctx.playerIndex.push_back(i);
  }
  const std::size_t m = ctx.playerIndex.size();
  ctx.rank.resize(m);
  ctx.groupSize.resize(m);
  ctx.groupPosition.resize(m);
  ctx.groupId.resize(m);
  std::size_t start = 0;
  int group = 0;
  while (start < m) {
    const int score = state.states()[ctx.playerIndex[start]].scoreHalfPoints;
    std::size_t end = start;
    while (end < m && state.states()[ctx.playerIndex[end]].scoreHalfPoints == score) ++end;
    for (std::size_t v = start; v < end; ++v) {
      ctx.rank[v] = static_cast<int>(v + 1);
      ctx.groupSize[v] = static_cast<int>(end - start);
      ctx.groupPosition[v] = static_cast<int>(v - start);
      ctx.groupId[v] = group;
    }
    ++group;
    start = end;
  }
  return ctx;
}

namespace {

// Uniform draw in the open interval (0, 1).
double openUnit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double piTerm(PairingSystem system, const RoundContext& ctx, std::size_t a, std::size_t b,
              Rng& rng, double exponent) {
  const double rankGap = std::abs(static_cast<double>(ctx.rank[a] - ctx.rank[b]));
  const bool sameGroup = ctx.groupId[a] == ctx.groupId[b];
  switch (system) {
    case PairingSystem::Monrad: return -rankGap;
    case PairingSystem::Burstein: return std::pow(rankGap, exponent);
    case PairingSystem::Dutch: {
      const double half = sameGroup ? ctx.groupSize[a] / 2.0 : 0.0;
      return -std::pow(std::abs(half - rankGap), exponent);
    }
    case PairingSystem::Random: return openUnit(rng);
    case PairingSystem::Random2: {
      const double u = openUnit(rng);
      if (!sameGroup) return -u;
      // Upper half holds the first ceil(k/2) players of a k-player group.
      const int upperSize = (ctx.groupSize[a] + 1) / 2;
      const bool aUpper = ctx.groupPosition[a] < upperSize;
      const bool bUpper = ctx.groupPosition[b] < upperSize;
      return aUpper != bUpper ? u : -u;
    }
  }
  return 0.0;
}

double piWeight(PairingSystem system, const PlayerId& a, const PlayerId& b,
                const TournamentState& state, Rng& rng, double exponent) {
  const auto bye = selectBye(state);
  if ((bye && (*bye == a || *bye == b)) || a == b)
    fail(ErrorCode::DomainError, "pi is defined for two distinct eligible players");
  const RoundContext ctx = makeRoundContext(state, bye);
  const std::size_t ia = state.indexOf(a);
  const std::size_t ib = state.indexOf(b);
  std::size_t va = 0;
  std::size_t vb = 0;
  for (std::size_t v = 0; v < ctx.playerIndex.size(); ++v) {
    if (ctx.playerIndex[v] == ia) va = v;
    if (ctx.playerIndex[v] == ib) vb = v;
  }
  return piTerm(system, ctx, va, vb, rng, exponent);
}

WeightedGraph PairingGraph::toWeightedGraph() const {
  WeightedGraph g;
  g.vertexCount = static_cast<int>(vertices.size());
  g.edges.reserve(edges.size());
  for (const PairingEdge& e : edges) {
    g.edges.push_back({static_cast<int>(e.u), static_cast<int>(e.v), e.scalar});
  }
  return g;
}

namespace {

// Candidate edges satisfying condition (1), with their tuples. Pi terms are
// evaluated once per candidate in (u, v) order so that random systems consume
// the generator identically whatever the color filter keeps.
struct Candidates {
  RoundContext ctx;
  std::vector<PlayerId> vertices;
  std::vector<PairingEdge> edges;
};

Candidates collectCandidates(const TournamentState& state, const std::optional<PlayerId>& bye,
                             const PiFunction& pi, double beta) {
  Candidates c;
  c.ctx = makeRoundContext(state, bye);
  const auto& players = state.players();
  const auto& states = state.states();
  const std::size_t m = c.ctx.playerIndex.size();
  c.vertices.reserve(m);
  for (std::size_t i : c.ctx.playerIndex) c.vertices.push_back(players[i].id);
  for (std::size_t u = 0; u < m; ++u) {
    const PlayerState& su = states[c.ctx.playerIndex[u]];
    for (std::size_t v = u + 1; v < m; ++v) {
      const PlayerState& sv = states[c.ctx.playerIndex[v]];
      if (su.opponents.count(c.vertices[v])) continue;
      PairingEdge e;
      e.u = u;
      e.v = v;
      e.weight.scoreTerm = -std::abs(su.scoreHalfPoints - sv.scoreHalfPoints) / 2.0;
      const int colorSum = std::abs(su.colorDiff + sv.colorDiff);
      e.weight.colorTerm = -colorSum;
      e.weight.piTerm = pi(u, v);
      e.colorViolation = !(colorSum < 2.0 * beta);
      c.edges.push_back(e);
    }
  }
  return c;
}

PairingGraph finishGraph(Candidates&& c, double beta, double piBound,
                         const std::optional<EncodingParams>& encoding, bool colorFallback) {
  PairingGraph g;
  g.vertices = std::move(c.vertices);
  for (PairingEdge& e : c.edges) {
    if (!e.colorViolation || colorFallback) g.edges.push_back(e);
  }
  double maxColorSum = 2.0 * beta;
  for (const PairingEdge& e : g.edges) maxColorSum = std::max(maxColorSum, double(-e.weight.colorTerm));
  g.encoding = encoding ? *encoding : EncodingParams::forBounds(maxColorSum, piBound);
  if (colorFallback) g.encoding.maxColorSum = std::max(g.encoding.maxColorSum, maxColorSum);

  double maxAbsScalar = 0.0;
  for (PairingEdge& e : g.edges) {
    e.scalar = encodeWeight(e.weight, g.encoding);
    maxAbsScalar = std::max(maxAbsScalar, std::abs(e.scalar));
  }
  if (colorFallback) {
    // One fewer color-violating board must outweigh any difference in the
    // regular encoding summed over a whole matching.
    const double boards = static_cast<double>(g.vertices.size()) / 2.0;
    const double penalty = smallestPowerOfTenAbove(2.0 * (boards + 1.0) * (maxAbsScalar + 1.0));
    for (PairingEdge& e : g.edges) {
      if (e.colorViolation) e.scalar -= penalty;
    }
  }
  return g;
}

}  // namespace

PairingGraph buildPairingGraph(const TournamentState& state, double beta,
                               const std::optional<PlayerId>& bye, const PiFunction& pi,
                               double piBound, const std::optional<EncodingParams>& encoding,
                               bool colorFallback) {
  return finishGraph(collectCandidates(state, bye, pi, beta), beta, piBound, encoding,
                     colorFallback);
}

PairingGraph buildPairingGraph(const TournamentState& state, PairingSystem system, double beta,
                               Rng& rng, const EngineOptions& options) {
  const auto bye = selectBye(state);
  const RoundContext ctx = makeRoundContext(state, bye);
  const PiFunction pi = [&](std::size_t u, std::size_t v) {
    return piTerm(system, ctx, u, v, rng, options.exponent);
  };
  return buildPairingGraph(state, beta, bye, pi,
                           maxAbsPi(system, ctx.playerIndex.size(), options.exponent),
                           options.encoding, false);
}

std::pair<PlayerId, PlayerId> assignColors(const PlayerId& a, const PlayerId& b,
                                           const TournamentState& state, Rng& rng) {
  const int cdA = state.state(a).colorDiff;
  const int cdB = state.state(b).colorDiff;
  if (cdA < cdB) return {a, b};
  if (cdB < cdA) return {b, a};
  return (rng() >> 63) ? std::pair{a, b} : std::pair{b, a};
}

namespace {

struct Solved {
  PairingGraph graph;
  PerfectMatching matching;
  bool fallbackUsed = false;
};

Solved solveWithFallback(const TournamentState& state, double beta,
                         const std::optional<PlayerId>& bye, const PiFunction& pi,
                         double piBound, const std::optional<EncodingParams>& encoding,
                         bool allowFallback) {
  Candidates candidates = collectCandidates(state, bye, pi, beta);
  Candidates copy = candidates;
  PairingGraph graph = finishGraph(std::move(candidates), beta, piBound, encoding, false);
  try {
    PerfectMatching m = maxWeightPerfectMatching(graph.toWeightedGraph());
    return {std::move(graph), std::move(m), false};
  } catch (const SwissError& e) {
    if (e.code() != ErrorCode::NoPerfectMatching) throw;
  }
  if (!allowFallback)
    fail(ErrorCode::NoLegalPairing, "no perfect matching satisfies the pairing conditions");
  PairingGraph relaxed = finishGraph(std::move(copy), beta, piBound, encoding, true);
  try {
    PerfectMatching m = maxWeightPerfectMatching(relaxed.toWeightedGraph());
    return {std::move(relaxed), std::move(m), true};
  } catch (const SwissError& e) {
    if (e.code() != ErrorCode::NoPerfectMatching) throw;
  }
  fail(ErrorCode::NoLegalPairing,
       "no perfect matching exists even with the color condition relaxed");
}

}  // namespace

Pairing computePairing(const TournamentState& state, Rng& rng, const EngineOptions& options) {
  return computePairing(state, state.system(), state.beta(), rng, options);
}

Pairing computePairing(const TournamentState& state, PairingSystem system, double beta, Rng& rng,
                       const EngineOptions& options) {
  if (!(options.exponent > 1.0)) fail(ErrorCode::InvalidConfig, "pi exponent must exceed 1");
  if (!(beta > 0.0)) fail(ErrorCode::InvalidConfig, "beta must be positive");
  Pairing pairing;
  pairing.round = state.roundsPlayed() + 1;
  pairing.bye = selectBye(state);

  const RoundContext ctx = makeRoundContext(state, pairing.bye);
  const PiFunction pi = [&](std::size_t u, std::size_t v) {
    return piTerm(system, ctx, u, v, rng, options.exponent);
  };
  Solved solved =
      solveWithFallback(state, beta, pairing.bye, pi,
                        maxAbsPi(system, ctx.playerIndex.size(), options.exponent),
                        options.encoding, options.allowFallback);
  pairing.fallbackUsed = solved.fallbackUsed;

  // Boards in order of the better-ranked player; vertices are rank-ordered
  // and pairs come back sorted by their first (smaller) vertex.
  for (const auto& [u, v] : solved.matching.pairs) {
    const PlayerId& a = solved.graph.vertices[static_cast<std::size_t>(u)];
    const PlayerId& b = solved.graph.vertices[static_cast<std::size_t>(v)];
    auto [white, black] = assignColors(a, b, state, rng);
    pairing.boards.push_back({std::move(white), std::move(black)});
  }
  for (std::size_t i = 0; i < pairing.boards.size(); ++i) {
    const Board& board = pairing.boards[i];
    if (state.state(board.white).scoreHalfPoints != state.state(board.black).scoreHalfPoints)
      pairing.floats.push_back(i);
  }
  return pairing;
}

std::vector<std::pair<PlayerId, PlayerId>> maxStrengthGapPairing(
    const TournamentState& state, const std::optional<PlayerId>& bye,
    const std::function<double(const PlayerId&)>& strengthOf) {
  const RoundContext ctx = makeRoundContext(state, bye);
  std::vector<double> strength;
  strength.reserve(ctx.playerIndex.size());
  for (std::size_t i : ctx.playerIndex) strength.push_back(strengthOf(state.players()[i].id));
  double maxGap = 0.0;
  if (!strength.empty()) {
    auto [lo, hi] = std::minmax_element(strength.begin(), strength.end());
    maxGap = *hi - *lo;
  }
  const PiFunction pi = [&](std::size_t u, std::size_t v) {
    return std::abs(strength[u] - strength[v]);
  };

  // Separation at the level of whole matchings, not single edges, so the
  // result is the exact lexicographic optimum.
  const double boards = std::max(1.0, static_cast<double>(ctx.playerIndex.size()) / 2.0);
  double maxColorSum = 2.0 * state.beta();
  for (std::size_t u = 0; u < ctx.playerIndex.size(); ++u) {
    for (std::size_t v = u + 1; v < ctx.playerIndex.size(); ++v) {
      maxColorSum = std::max(maxColorSum, double(std::abs(state.states()[ctx.playerIndex[u]].colorDiff +
                                                          state.states()[ctx.playerIndex[v]].colorDiff)));
    }
  }
  EncodingParams enc;
  enc.maxColorSum = maxColorSum;
  enc.maxAbsPi = std::max(maxGap, 1.0);
  enc.colorFactor = smallestPowerOfTenAbove(boards * enc.maxAbsPi);
  enc.scoreFactor =
      smallestPowerOfTenAbove(2.0 * boards * (enc.colorFactor * maxColorSum + enc.maxAbsPi));

  Solved solved = solveWithFallback(state, state.beta(), bye, pi, enc.maxAbsPi, enc, true);
  std::vector<std::pair<PlayerId, PlayerId>> out;
  for (const auto& [u, v] : solved.matching.pairs) {
    out.emplace_back(solved.graph.vertices[static_cast<std::size_t>(u)],
                     solved.graph.vertices[static_cast<std::size_t>(v)]);
  }
  return out;
}

}  // namespace swiss
