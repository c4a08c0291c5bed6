#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "swiss/io.hpp"
#include "swiss/metrics.hpp"
#include "swiss/service.hpp"
#include "swiss/simulator.hpp"

using namespace swiss;

namespace {

constexpr int kUsageError = 1;
constexpr int kDomainError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<PairingSystem> parseSystems(const std::string& text) {
  if (text == "all") return {kAllSystems.begin(), kAllSystems.end()};
  std::vector<PairingSystem> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parsePairingSystem(item));
  return out;
}

std::vector<GameResult> parseResults(const std::string& text) {
  std::vector<GameResult> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parseGameResult(item));
  return out;
}

struct SimulateArgs {
  std::string config;
  int players = 32;
  int rounds = 7;
  double beta = 2.0;
  std::string dist = "uniform:1400:2200";
  std::string systems = "all";
  int samples = 2000;
  std::uint64_t seed = 42;
  int threads = 0;
  double exponent = 1.01;
  bool skipNormalized = false;
  std::string out;
  std::string summary;
  std::string writeConfig;
};

ExperimentConfig configFrom(const SimulateArgs& a, const CLI::App& cmd) {
  ExperimentConfig c;
  if (!a.config.empty()) c = experimentConfigFromJson(readJsonFile(a.config));
  // Flags given explicitly override the config file.
  auto given = [&](const char* name) { return a.config.empty() || cmd.count(name) > 0; };
  if (given("--players")) c.players = a.players;
  if (given("--rounds")) c.rounds = a.rounds;
  if (given("--beta")) c.beta = a.beta;
  if (given("--dist")) c.strength = parseStrengthSpec(a.dist);
  if (given("--systems")) c.systems = parseSystems(a.systems);
  if (given("--samples")) c.samples = a.samples;
  if (given("--seed")) c.masterSeed = a.seed;
  if (given("--threads")) c.threads = a.threads;
  if (given("--exponent")) c.exponent = a.exponent;
  if (cmd.count("--no-normalized") > 0) c.computeNormalized = false;
  return c;
}

void printWarnings(const ExperimentConfig& c) {
  try {
    for (const auto& w : c.validate()) std::cerr << "warning: " << w << '\n';
  } catch (const SwissError& e) {
    throw UsageError(e.what());
  }
}

void writeOutput(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ostringstream buffer;
  write(buffer);
  writeFileAtomic(path, buffer.str());
}

template <typename F>
auto asUsage(F&& f) {
  try {
    return f();
  } catch (const SwissError& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw UsageError(e.what());
  }
}

int runSimulate(const SimulateArgs& a, const CLI::App& cmd) {
  const ExperimentConfig config = asUsage([&] { return configFrom(a, cmd); });
  printWarnings(config);
  if (!a.writeConfig.empty()) writeFileAtomic(a.writeConfig, toJson(config).dump(2) + "\n");
  const SampleTable table = runExperiment(config);
  writeOutput(a.out, [&](std::ostream& o) { writeSampleCsv(o, table); });
  std::size_t failed = 0;
  for (const auto& r : table.rows) failed += r.metrics.failed ? 1 : 0;
  if (failed > 0) std::cerr << "warning: " << failed << " tournaments had no legal pairing\n";
  const auto summary = summarize(table);
  if (!a.summary.empty()) {
    writeOutput(a.summary, [&](std::ostream& o) { writeSummaryCsv(o, summary); });
  } else {
    writeSummaryCsv(a.out.empty() || a.out == "-" ? std::cerr : std::cout, summary);
  }
  return 0;
}

struct PairArgs {
  std::string file;
  std::string system;
  double beta = 0.0;
  std::uint64_t seed = 1;
  std::string format = "both";
  bool commit = false;
  std::string results;
};

void printPairingText(std::ostream& out, const Pairing& p, const TournamentState& state,
                      PairingSystem system, double beta) {
  out << "Round " << p.round << " (" << to_string(system) << ", beta " << formatNumber(beta)
      << ")\n";
  for (std::size_t i = 0; i < p.boards.size(); ++i) {
    const Board& b = p.boards[i];
    const bool isFloat = std::find(p.floats.begin(), p.floats.end(), i) != p.floats.end();
    out << "  " << (i + 1) << ". " << b.white << " (" << formatNumber(state.state(b.white).points())
        << ") - " << b.black << " (" << formatNumber(state.state(b.black).points()) << ")"
        << (isFloat ? "  float" : "") << '\n';
  }
  if (p.bye) out << "  bye: " << *p.bye << '\n';
  if (p.fallbackUsed) out << "  note: color condition relaxed\n";
}

int runPair(const PairArgs& a) {
  if (a.commit && a.results.empty()) throw UsageError("--commit needs --results");
  if (!a.commit && !a.results.empty()) throw UsageError("--results is only used with --commit");
  if (a.format != "text" && a.format != "json" && a.format != "both")
    throw UsageError("--format must be text, json or both");
  TournamentState state = loadTournament(a.file);
  const PairingSystem system = a.system.empty() ? state.system() : parsePairingSystem(a.system);
  const double beta = a.beta > 0.0 ? a.beta : state.beta();
  Rng rng(a.seed);
  const Pairing pairing = computePairing(state, system, beta, rng);
  if (a.format != "json") printPairingText(std::cout, pairing, state, system, beta);
  if (a.format != "text") std::cout << toJson(pairing, state).dump() << '\n';

  if (a.commit) {
    const auto results = parseResults(a.results);
    if (results.size() != pairing.boards.size())
      throw UsageError("--results needs one result per board (" +
                       std::to_string(pairing.boards.size()) + ")");
    std::vector<MatchRecord> records;
    if (pairing.bye) records.push_back(MatchRecord::bye(pairing.round, *pairing.bye));
    for (std::size_t i = 0; i < results.size(); ++i)
      records.push_back(MatchRecord::game(pairing.round, pairing.boards[i].white,
                                          pairing.boards[i].black, results[i]));
    saveTournament(a.file, applyResults(state, records));
  }
  return 0;
}

struct StudyArgs {
  int players = 32;
  int rounds = 7;
  double beta = 2.0;
  std::string dist = "uniform:1400:2200";
  std::string system = "Dutch";
  int outer = 200;
  int inner = 500;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out;
};

int runStudy(const StudyArgs& a) {
  ExperimentConfig c;
  c.players = a.players;
  c.rounds = a.rounds;
  c.beta = a.beta;
  c.strength = asUsage([&] { return parseStrengthSpec(a.dist); });
  c.systems = {asUsage([&] { return parsePairingSystem(a.system); })};
  c.mode = ExperimentMode::ReplayFirstRound;
  c.outerTournaments = a.outer;
  c.innerReplays = a.inner;
  c.masterSeed = a.seed;
  c.threads = a.threads;
  printWarnings(c);
  const auto rows = runCorrelationStudy(c);
  writeOutput(a.out, [&](std::ostream& o) { writeCorrelationCsv(o, rows); });
  std::vector<double> values;
  for (const auto& r : rows)
    if (r.pearson) values.push_back(*r.pearson);
  std::ostream& info = a.out.empty() || a.out == "-" ? std::cerr : std::cout;
  const auto negative = std::count_if(values.begin(), values.end(), [](double v) { return v < 0; });
  info << "tournaments " << rows.size() << ", flagged " << rows.size() - values.size();
  if (!values.empty()) {
    const auto s = describe(values);
    info << ", negative " << formatNumber(double(negative) / double(values.size()))
         << ", mean " << formatNumber(s.mean) << ", median " << formatNumber(s.median);
  }
  info << '\n';
  return 0;
}

struct ServeArgs {
  ServeOptions options;
  std::string data = "data";
  std::string staticDir;
};

int runServe(ServeArgs a) {
  a.options.dataDir = a.data;
  if (!a.staticDir.empty()) a.options.staticDir = a.staticDir;
  if (!serve(a.options)) {
    std::cerr << "error: cannot listen on " << a.options.host << ':' << a.options.port << '\n';
    return kDomainError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swiss-system pairing via maximum weight matching"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo tournament experiment");
  simulate->add_option("--config", sim.config, "Experiment config (JSON)");
  simulate->add_option("--players", sim.players, "Number of players (even)");
  simulate->add_option("--rounds", sim.rounds, "Rounds per tournament");
  simulate->add_option("--beta", sim.beta, "Maximum color difference");
  simulate->add_option("--dist", sim.dist, "uniform:LO:HI, exponential:LO:HI:MEAN, normal:LO:HI:MEAN:SD, empirical:FILE:LO:HI");
  simulate->add_option("--systems", sim.systems, "all or a comma list of Dutch,Burstein,Monrad,Random,Random2");
  simulate->add_option("--samples", sim.samples, "Tournaments per system");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = auto)");
  simulate->add_option("--exponent", sim.exponent, "Exponent of the Dutch and Burstein terms");
  simulate->add_flag("--no-normalized", sim.skipNormalized, "Skip the normalized strength difference");
  simulate->add_option("--out", sim.out, "Sample CSV (default: standard output)");
  simulate->add_option("--summary", sim.summary, "Summary CSV");
  simulate->add_option("--write-config", sim.writeConfig, "Write the effective config as JSON");

  PairArgs pr;
  auto* pair = app.add_subcommand("pair", "Pair the next round of a tournament file");
  pair->add_option("file", pr.file, "Tournament file (JSON)")->required();
  pair->add_option("--system", pr.system, "Override the pairing system");
  pair->add_option("--beta", pr.beta, "Override beta");
  pair->add_option("--seed", pr.seed, "Seed for color coin flips and random terms");
  pair->add_option("--format", pr.format, "text, json or both");
  pair->add_flag("--commit", pr.commit, "Append the round to the file");
  pair->add_option("--results", pr.results, "Comma list of results per board (1-0, 1/2, 0-1)");

  StudyArgs st;
  auto* study = app.add_subcommand("study", "Round-1 replay correlation study");
  study->add_option("--players", st.players, "Number of players (even)");
  study->add_option("--rounds", st.rounds, "Rounds per tournament");
  study->add_option("--beta", st.beta, "Maximum color difference");
  study->add_option("--dist", st.dist, "Strength distribution");
  study->add_option("--system", st.system, "Pairing system");
  study->add_option("--outer", st.outer, "Outer tournaments");
  study->add_option("--inner", st.inner, "Replays per tournament");
  study->add_option("--seed", st.seed, "Master seed");
  study->add_option("--threads", st.threads, "Worker threads (0 = auto)");
  study->add_option("--out", st.out, "CSV output (default: standard output)");

  ServeArgs sv;
  auto* server = app.add_subcommand("serve", "Run the HTTP service");
  server->add_option("--host", sv.options.host, "Bind address");
  server->add_option("--port", sv.options.port, "Port (0 picks a free one)");
  server->add_option("--data", sv.data, "Data directory");
  server->add_option("--static", sv.staticDir, "Directory served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*simulate) return runSimulate(sim, *simulate);
    if (*pair) return runPair(pr);
    if (*study) return runStudy(st);
    if (*server) return runServe(sv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SwissError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig ? kUsageError : kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return 0;
}
