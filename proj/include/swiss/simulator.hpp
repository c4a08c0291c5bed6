#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swiss/core.hpp"
#include "swiss/metrics.hpp"
#include "swiss/outcome.hpp"
#include "swiss/pairing.hpp"

namespace swiss {

enum class ExperimentMode { Standard, ReplayFirstRound };

struct ExperimentConfig {
  int players = 32;
  int rounds = 7;
  std::vector<PairingSystem> systems{kAllSystems.begin(), kAllSystems.end()};
  double beta = 2.0;
  StrengthDistributionSpec strength = UniformStrength{1400.0, 2200.0};
  int samples = 2000;
  std::uint64_t masterSeed = 42;
  ExperimentMode mode = ExperimentMode::Standard;
  int outerTournaments = 1000;  // ReplayFirstRound only
  int innerReplays = 1000;      // ReplayFirstRound only
  /// Worker count; 0 picks SWISS_MWM_THREADS or the hardware concurrency.
  int threads = 0;
  /// The normalized strength difference needs an extra matching per round.
  bool computeNormalized = true;
  OutcomeModelParams outcome;
  double exponent = 1.01;

  /// Throws InvalidConfig for unusable settings; returns warnings (for
  /// example a round count outside [ceil(log2 n), n/2]).
  std::vector<std::string> validate() const;
};

struct MetricRow {
  double kendallTau = 0.0;
  double spearmanRho = 0.0;
  double ndcg = 0.0;
  int floatPairs = 0;
  std::vector<int> acdByRound;
  double paradoxicalProportion = 0.0;
  /// Mean |str_i - str_j| over all games of the tournament.
  double meanStrengthDiff = 0.0;
  double normalizedStrengthDiff = 0.0;
  bool fallbackUsed = false;
  bool failed = false;
  std::string error;
};

struct SampleRow {
  int sampleIndex = 0;
  PairingSystem system = PairingSystem::Dutch;
  std::uint64_t seed = 0;
  MetricRow metrics;
};

struct SampleTable {
  int players = 0;
  int rounds = 0;
  double beta = 0.0;
  std::vector<SampleRow> rows;  // systems in config order, then sample index
};

/// Stable per-replication seed from (master seed, system name, index).
std::uint64_t replicationSeed(std::uint64_t masterSeed, std::string_view stream,
                              std::uint64_t index);

struct TournamentRun {
  TournamentState state;
  std::vector<Pairing> pairings;
  MetricRow metrics;
};

/// Overrides the sampled result of a board; return nullopt to sample.
using ResultOverride = std::function<std::optional<GameResult>(int round, const Board& board)>;

struct TournamentSetup {
  PairingSystem system = PairingSystem::Dutch;
  double beta = 2.0;
  int rounds = 7;
  OutcomeModelParams outcome;
  double exponent = 1.01;
  bool computeNormalized = true;
};

/// Builds players p1..pn with the given strengths and Elos (lot order drawn
/// from `rng`), plays all rounds and computes the metrics against the
/// true-strength order. Checks no-repeat and color invariants after every
/// round and throws InvariantViolation if one fails; NoLegalPairing
/// propagates.
TournamentRun runTournament(const TournamentSetup& setup, std::span<const double> strengths,
                            std::span<const int> elos, Rng& rng,
                            const ResultOverride& override = {});

/// Draws strengths and Elos for one replication and runs it.
TournamentRun runReplication(const ExperimentConfig& config, PairingSystem system,
                             std::uint64_t seed);

/// One row per (system, sample). Failed tournaments are kept and flagged.
SampleTable runExperiment(const ExperimentConfig& config);

struct CorrelationRow {
  int outerIndex = 0;
  std::uint64_t seed = 0;
  std::optional<double> pearson;  // empty when the replays had zero variance
};

/// For each outer tournament the round-1 pairing is fixed and its results are
/// replayed `innerReplays` times; each replay records Kendall tau after round
/// 1 and the mean strength difference of the round-2 pairing. Uses the first
/// configured system.
std::vector<CorrelationRow> runCorrelationStudy(const ExperimentConfig& config);

struct Statistics {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double ciLow = 0.0;
  double ciHigh = 0.0;
};

/// Sample statistics; quartiles by linear interpolation (type 7), 95% CI as
/// mean +- 1.96 sd / sqrt(n). Throws DomainError for an empty sample.
Statistics describe(std::span<const double> values);

struct SummaryRow {
  PairingSystem system = PairingSystem::Dutch;
  std::string metric;
  Statistics stats;
};

/// Per system and metric over the rows that did not fail.
std::vector<SummaryRow> summarize(const SampleTable& table);

/// Metric values of one system, failed rows skipped. Metric names follow the
/// CSV header ("kendall_tau", "acd_r3", ...).
std::vector<double> metricValues(const SampleTable& table, PairingSystem system,
                                 std::string_view metric);

std::vector<std::string> csvHeader(int rounds);
void writeSampleCsv(std::ostream& out, const SampleTable& table);
void writeSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& summary);
void writeCorrelationCsv(std::ostream& out, const std::vector<CorrelationRow>& rows);

/// Shortest round-trip decimal form.
std::string formatNumber(double value);

int resolveThreadCount(int requested);

}  // namespace swiss
