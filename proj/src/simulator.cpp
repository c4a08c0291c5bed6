#include "swiss/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

namespace swiss {

std::vector<std::string> ExperimentConfig::validate() const {
  if (players < 2 || players % 2 != 0)
    fail(ErrorCode::InvalidConfig, "players must be an even number of at least 2");
  if (rounds < 1) fail(ErrorCode::InvalidConfig, "rounds must be at least 1");
  if (rounds >= players)
    fail(ErrorCode::InvalidConfig, "rounds must be below the number of players");
  if (samples < 1) fail(ErrorCode::InvalidConfig, "samples must be at least 1");
  if (systems.empty()) fail(ErrorCode::InvalidConfig, "no pairing system selected");
  if (std::set<PairingSystem>(systems.begin(), systems.end()).size() != systems.size())
    fail(ErrorCode::InvalidConfig, "pairing systems listed twice");
  if (!(beta > 0.0)) fail(ErrorCode::InvalidConfig, "beta must be positive");
  if (!(exponent > 1.0)) fail(ErrorCode::InvalidConfig, "exponent must exceed 1");
  if (threads < 0) fail(ErrorCode::InvalidConfig, "threads must not be negative");
  swiss::validate(strength);
  std::visit(
      [](const auto& s) {
        if (s.lo < kMinStrength || s.hi > kMaxStrength)
          fail(ErrorCode::InvalidConfig, "strength range must lie within [1000, 3000]");
      },
      strength);
  if (mode == ExperimentMode::ReplayFirstRound) {
    if (outerTournaments < 1 || innerReplays < 2)
      fail(ErrorCode::InvalidConfig, "replay study needs outer >= 1 and inner >= 2");
    if (rounds < 2) fail(ErrorCode::InvalidConfig, "replay study needs at least two rounds");
  }

  std::vector<std::string> warnings;
  const int lower = static_cast<int>(std::ceil(std::log2(double(players))));
  if (rounds < lower || rounds > players / 2) {
    warnings.push_back("rounds = " + std::to_string(rounds) + " lies outside [" +
                       std::to_string(lower) + ", " + std::to_string(players / 2) +
                       "]; a perfect matching is not guaranteed in every round");
  }
  return warnings;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t replicationSeed(std::uint64_t masterSeed, std::string_view stream,
                              std::uint64_t index) {
  std::uint64_t h = splitmix64(masterSeed);
  h = splitmix64(h ^ fnv1a(stream));
  return splitmix64(h ^ index);
}

namespace {

std::vector<Player> makePlayers(std::span<const double> strengths, std::span<const int> elos,
                                Rng& rng) {
  if (strengths.size() != elos.size())
    fail(ErrorCode::InvalidConfig, "strengths and Elos differ in length");
  const std::vector<int> lots = drawLots(strengths.size(), rng);
  std::vector<Player> players;
  players.reserve(strengths.size());
  for (std::size_t i = 0; i < strengths.size(); ++i) {
    players.push_back({"p" + std::to_string(i + 1), "", elos[i], strengths[i], lots[i]});
  }
  return players;
}

std::vector<MatchRecord> playRound(const TournamentState& state, const Pairing& pairing,
                                   const OutcomeModelParams& params, Rng& rng,
                                   const ResultOverride& override) {
  std::vector<MatchRecord> records;
  records.reserve(pairing.boards.size() + 1);
  if (pairing.bye) records.push_back(MatchRecord::bye(pairing.round, *pairing.bye));
  for (const Board& b : pairing.boards) {
    std::optional<GameResult> forced;
    if (override) forced = override(pairing.round, b);
    GameResult result;
    if (forced) {
      result = *forced;
    } else {
      const auto d = outcomeDistribution(*state.player(b.white).trueStrength,
                                         *state.player(b.black).trueStrength, params);
      result = sampleResult(d, rng);
    }
    records.push_back(MatchRecord::game(pairing.round, b.white, b.black, result));
  }
  return records;
}

void checkRoundInvariants(const TournamentState& state, const Pairing& pairing, double beta) {
  const int bound = std::max(1, static_cast<int>(std::floor(beta)));
  int acd = 0;
  for (std::size_t i = 0; i < state.playerCount(); ++i) {
    const int cd = state.states()[i].colorDiff;
    acd += std::abs(cd);
    if (!pairing.fallbackUsed && std::abs(cd) > bound) {
      fail(ErrorCode::InvariantViolation, "player " + state.players()[i].id + " has |cd| = " +
                                              std::to_string(std::abs(cd)) + " after round " +
                                              std::to_string(pairing.round));
    }
  }
  const int n = static_cast<int>(state.playerCount());
  if (n % 2 == 0 && pairing.round % 2 == 1 && acd < n) {
    fail(ErrorCode::InvariantViolation,
         "acd " + std::to_string(acd) + " below n after round " + std::to_string(pairing.round));
  }
}

}  // namespace

TournamentRun runTournament(const TournamentSetup& setup, std::span<const double> strengths,
                            std::span<const int> elos, Rng& rng, const ResultOverride& override) {
  TournamentRun run;
  run.state = TournamentState::create("simulation", setup.system, setup.beta,
                                      makePlayers(strengths, elos, rng));
  EngineOptions options;
  options.exponent = setup.exponent;
  for (int r = 0; r < setup.rounds; ++r) {
    Pairing pairing = computePairing(run.state, rng, options);
    // applyResults rejects repeated pairs, so the no-repeat rule is enforced here too.
    auto records = playRound(run.state, pairing, setup.outcome, rng, override);
    try {
      run.state = applyResults(run.state, records);
    } catch (const SwissError& e) {
      fail(ErrorCode::InvariantViolation, std::string("engine produced an invalid round: ") + e.what());
    }
    checkRoundInvariants(run.state, pairing, setup.beta);
    run.metrics.fallbackUsed = run.metrics.fallbackUsed || pairing.fallbackUsed;
    run.pairings.push_back(std::move(pairing));
  }

  const StrengthOf strengthOf = trueStrengthLookup(run.state);
  const Ranking truth = trueStrengthOrder(run.state, strengthOf);
  const Ranking final = finalRanking(run.state);
  MetricRow& m = run.metrics;
  m.kendallTau = kendallTau(final, truth);
  m.spearmanRho = spearmanRho(final, truth);
  m.ndcg = ndcg(final, truth);
  m.floatPairs = floatPairs(run.state);
  m.acdByRound = absoluteColorDifferenceByRound(run.state);
  m.paradoxicalProportion = paradoxicalProportion(run.state, strengthOf);
  double gap = 0.0;
  int games = 0;
  for (const Pairing& p : run.pairings) {
    for (const Board& b : p.boards) {
      gap += std::abs(strengthOf(b.white) - strengthOf(b.black));
      ++games;
    }
  }
  m.meanStrengthDiff = games == 0 ? 0.0 : gap / games;
  m.normalizedStrengthDiff = setup.computeNormalized
                                 ? normalizedStrengthDifference(run.state, strengthOf)
                                 : std::nan("");
  return run;
}

namespace {

TournamentSetup setupFor(const ExperimentConfig& config, PairingSystem system) {
  TournamentSetup setup;
  setup.system = system;
  setup.beta = config.beta;
  setup.rounds = config.rounds;
  setup.outcome = config.outcome;
  setup.exponent = config.exponent;
  setup.computeNormalized = config.computeNormalized;
  return setup;
}

void drawField(const ExperimentConfig& config, Rng& rng, std::vector<double>& strengths,
               std::vector<int>& elos) {
  strengths = sampleStrengths(config.strength, config.players, rng);
  elos.clear();
  for (double s : strengths) elos.push_back(sampleElo(s, rng));
}

// Runs body(i) for i in [0, count) on a pool of workers. The first exception
// stops the pool and is rethrown.
template <typename F>
void parallelFor(int count, int threads, F&& body) {
  const int workers = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex errorMutex;
  auto work = [&] {
    while (!stop) {
      const int i = next++;
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(errorMutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

int resolveThreadCount(int requested) {
  if (requested > 0) return requested;
  int count = static_cast<int>(std::thread::hardware_concurrency());
  if (count <= 0) count = 1;
  if (const char* env = std::getenv("SWISS_MWM_THREADS")) {
    int cap = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec == std::errc() && ptr == text.data() + text.size() && cap > 0)
      count = std::min(count, cap);
  }
  return count;
}

TournamentRun runReplication(const ExperimentConfig& config, PairingSystem system,
                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> strengths;
  std::vector<int> elos;
  drawField(config, rng, strengths, elos);
  return runTournament(setupFor(config, system), strengths, elos, rng);
}

SampleTable runExperiment(const ExperimentConfig& config) {
  config.validate();
  SampleTable table;
  table.players = config.players;
  table.rounds = config.rounds;
  table.beta = config.beta;
  const int perSystem = config.samples;
  const int total = perSystem * static_cast<int>(config.systems.size());
  table.rows.resize(static_cast<std::size_t>(total));

  parallelFor(total, resolveThreadCount(config.threads), [&](int i) {
    const PairingSystem system = config.systems[static_cast<std::size_t>(i / perSystem)];
    SampleRow& row = table.rows[static_cast<std::size_t>(i)];
    row.system = system;
    row.sampleIndex = i % perSystem;
    row.seed = replicationSeed(config.masterSeed, to_string(system),
                               static_cast<std::uint64_t>(row.sampleIndex));
    try {
      row.metrics = runReplication(config, system, row.seed).metrics;
    } catch (const SwissError& e) {
      if (e.code() != ErrorCode::NoLegalPairing) throw;
      row.metrics = MetricRow{};
      row.metrics.failed = true;
      row.metrics.error = e.what();
    }
  });
  return table;
}

std::vector<CorrelationRow> runCorrelationStudy(const ExperimentConfig& config) {
  config.validate();
  if (config.mode != ExperimentMode::ReplayFirstRound)
    fail(ErrorCode::InvalidConfig, "the correlation study needs the replay-first-round mode");
  const PairingSystem system = config.systems.front();
  std::vector<CorrelationRow> rows(static_cast<std::size_t>(config.outerTournaments));
  EngineOptions options;
  options.exponent = config.exponent;

  parallelFor(config.outerTournaments, resolveThreadCount(config.threads), [&](int outer) {
    CorrelationRow& row = rows[static_cast<std::size_t>(outer)];
    row.outerIndex = outer;
    row.seed = replicationSeed(config.masterSeed, "study:" + std::string(to_string(system)),
                               static_cast<std::uint64_t>(outer));
    Rng rng(row.seed);
    std::vector<double> strengths;
    std::vector<int> elos;
    drawField(config, rng, strengths, elos);
    const TournamentState start = TournamentState::create(
        "study", system, config.beta, makePlayers(strengths, elos, rng));
    const Pairing first = computePairing(start, rng, options);
    const StrengthOf strengthOf = trueStrengthLookup(start);
    const Ranking truth = trueStrengthOrder(start, strengthOf);

    std::vector<double> taus;
    std::vector<double> gaps;
    for (int inner = 0; inner < config.innerReplays; ++inner) {
      Rng replay(replicationSeed(row.seed, "replay", static_cast<std::uint64_t>(inner)));
      const TournamentState after =
          applyResults(start, playRound(start, first, config.outcome, replay, {}));
      taus.push_back(kendallTau(finalRanking(after), truth));
      gaps.push_back(meanStrengthDifference(computePairing(after, replay, options), strengthOf));
    }
    try {
      row.pearson = pearson(taus, gaps);
    } catch (const SwissError& e) {
      if (e.code() != ErrorCode::DomainError) throw;
    }
  });
  return rows;
}

Statistics describe(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::DomainError, "no values to describe");
  Statistics s;
  s.count = values.size();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / double(s.count);
  double sq = 0.0;
  for (double v : sorted) sq += (v - s.mean) * (v - s.mean);
  s.sd = s.count > 1 ? std::sqrt(sq / double(s.count - 1)) : 0.0;
  auto quantile = [&](double p) {
    const double h = (double(s.count) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, s.count - 1);
    return sorted[lo] + (h - double(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  const double half = 1.96 * s.sd / std::sqrt(double(s.count));
  s.ciLow = s.mean - half;
  s.ciHigh = s.mean + half;
  return s;
}

namespace {

std::optional<double> metricOf(const MetricRow& m, std::string_view metric) {
  if (metric == "kendall_tau") return m.kendallTau;
  if (metric == "spearman_rho") return m.spearmanRho;
  if (metric == "ndcg") return m.ndcg;
  if (metric == "float_pairs") return double(m.floatPairs);
  if (metric == "paradoxical") return m.paradoxicalProportion;
  if (metric == "mean_sd") return m.meanStrengthDiff;
  if (metric == "normalized_sd") {
    if (std::isnan(m.normalizedStrengthDiff)) return std::nullopt;
    return m.normalizedStrengthDiff;
  }
  if (metric.substr(0, 5) == "acd_r") {
    int round = 0;
    auto [ptr, ec] = std::from_chars(metric.data() + 5, metric.data() + metric.size(), round);
    if (ec != std::errc() || ptr != metric.data() + metric.size() || round < 1)
      fail(ErrorCode::DomainError, "unknown metric '" + std::string(metric) + "'");
    if (round > static_cast<int>(m.acdByRound.size())) return std::nullopt;
    return double(m.acdByRound[static_cast<std::size_t>(round - 1)]);
  }
  fail(ErrorCode::DomainError, "unknown metric '" + std::string(metric) + "'");
}

std::vector<std::string> metricNames(int rounds) {
  std::vector<std::string> names{"kendall_tau", "spearman_rho", "ndcg",  "float_pairs",
                                 "paradoxical", "mean_sd",      "normalized_sd"};
  for (int r = 1; r <= rounds; ++r) names.push_back("acd_r" + std::to_string(r));
  return names;
}

}  // namespace

std::vector<double> metricValues(const SampleTable& table, PairingSystem system,
                                 std::string_view metric) {
  std::vector<double> out;
  for (const SampleRow& row : table.rows) {
    if (row.system != system || row.metrics.failed) continue;
    if (auto v = metricOf(row.metrics, metric)) out.push_back(*v);
  }
  return out;
}

std::vector<SummaryRow> summarize(const SampleTable& table) {
  std::vector<PairingSystem> systems;
  for (const SampleRow& row : table.rows) {
    if (std::find(systems.begin(), systems.end(), row.system) == systems.end())
      systems.push_back(row.system);
  }
  std::vector<SummaryRow> out;
  for (PairingSystem system : systems) {
    for (const std::string& metric : metricNames(table.rounds)) {
      const auto values = metricValues(table, system, metric);
      if (values.empty()) continue;
      out.push_back({system, metric, describe(values)});
    }
  }
  return out;
}

std::string formatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

std::vector<std::string> csvHeader(int rounds) {
  std::vector<std::string> header{"sample_id", "system",       "n",           "rounds",
                                  "beta",      "seed",         "kendall_tau", "spearman_rho",
                                  "ndcg",      "float_pairs",  "paradoxical", "mean_sd",
                                  "normalized_sd"};
  for (int r = 1; r <= rounds; ++r) header.push_back("acd_r" + std::to_string(r));
  header.push_back("fallback_used");
  return header;
}

void writeSampleCsv(std::ostream& out, const SampleTable& table) {
  const auto header = csvHeader(table.rounds);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const SampleRow& row : table.rows) {
    const MetricRow& m = row.metrics;
    out << row.sampleIndex << ',' << to_string(row.system) << ',' << table.players << ','
        << table.rounds << ',' << formatNumber(table.beta) << ',' << row.seed << ',';
    if (m.failed) {
      for (int k = 0; k < 7 + table.rounds; ++k) out << ',';
      out << "error\n";
      continue;
    }
    out << formatNumber(m.kendallTau) << ',' << formatNumber(m.spearmanRho) << ','
        << formatNumber(m.ndcg) << ',' << m.floatPairs << ','
        << formatNumber(m.paradoxicalProportion) << ',' << formatNumber(m.meanStrengthDiff) << ','
        << formatNumber(m.normalizedStrengthDiff);
    for (int acd : m.acdByRound) out << ',' << acd;
    out << ',' << (m.fallbackUsed ? 1 : 0) << '\n';
  }
}

void writeSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "system,metric,count,mean,sd,q1,median,q3,ci_low,ci_high\n";
  for (const SummaryRow& r : summary) {
    const Statistics& s = r.stats;
    out << to_string(r.system) << ',' << r.metric << ',' << s.count << ',' << formatNumber(s.mean)
        << ',' << formatNumber(s.sd) << ',' << formatNumber(s.q1) << ','
        << formatNumber(s.median) << ',' << formatNumber(s.q3) << ',' << formatNumber(s.ciLow)
        << ',' << formatNumber(s.ciHigh) << '\n';
  }
}

void writeCorrelationCsv(std::ostream& out, const std::vector<CorrelationRow>& rows) {
  out << "outer_id,seed,pearson,flagged\n";
  for (const CorrelationRow& r : rows) {
    out << r.outerIndex << ',' << r.seed << ',' << (r.pearson ? formatNumber(*r.pearson) : "")
        << ',' << (r.pearson ? 0 : 1) << '\n';
  }
}

}  // namespace swiss
