#include "swiss/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace swiss {

namespace {

[[noreturn]] void parseFail(const std::string& message) { fail(ErrorCode::ParseError, message); }

const Json& member(const Json& json, const char* key) {
  if (!json.is_object()) parseFail(std::string("expected an object holding '") + key + "'");
  auto it = json.find(key);
  if (it == json.end()) parseFail(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& json, const char* key) {
  const Json& value = member(json, key);
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    parseFail(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
void getIfPresent(const Json& json, const char* key, T& out) {
  if (json.contains(key)) out = get<T>(json, key);
}

void rejectUnknown(const Json& json, std::initializer_list<const char*> known, const char* what) {
  if (!json.is_object()) parseFail(std::string(what) + " must be an object");
  for (const auto& [key, _] : json.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) parseFail(std::string("unknown field '") + key + "' in " + what);
  }
}

}  // namespace

Json toJson(const Player& player) {
  return Json{{"id", player.id}, {"name", player.name}, {"elo", player.elo},
              {"lotOrder", player.lotOrder}};
}

Json toJson(const MatchRecord& record) {
  if (const auto* g = std::get_if<Game>(&record.kind)) {
    return Json{{"round", record.round},
                {"white", g->white},
                {"black", g->black},
                {"result", std::string(to_string(g->result))}};
  }
  return Json{{"round", record.round}, {"bye", std::get<Bye>(record.kind).player}};
}

Json toJson(const TournamentState& state) {
  Json players = Json::array();
  for (const Player& p : state.players()) players.push_back(toJson(p));
  Json history = Json::array();
  for (const MatchRecord& r : state.history()) history.push_back(toJson(r));
  return Json{{"name", state.name()},
              {"system", std::string(to_string(state.system()))},
              {"beta", state.beta()},
              {"players", std::move(players)},
              {"history", std::move(history)}};
}

Player playerFromJson(const Json& json) {
  if (json.is_object() && json.contains("trueStrength"))
    parseFail("tournament files must not carry true strengths");
  rejectUnknown(json, {"id", "name", "elo", "lotOrder"}, "player");
  Player p;
  p.id = get<std::string>(json, "id");
  getIfPresent(json, "name", p.name);
  p.elo = get<int>(json, "elo");
  p.lotOrder = get<int>(json, "lotOrder");
  return p;
}

MatchRecord matchRecordFromJson(const Json& json) {
  const int round = get<int>(json, "round");
  if (json.contains("bye")) {
    rejectUnknown(json, {"round", "bye"}, "bye record");
    return MatchRecord::bye(round, get<std::string>(json, "bye"));
  }
  rejectUnknown(json, {"round", "white", "black", "result"}, "game record");
  return MatchRecord::game(round, get<std::string>(json, "white"), get<std::string>(json, "black"),
                           parseGameResult(get<std::string>(json, "result")));
}

TournamentState tournamentFromJson(const Json& json) {
  rejectUnknown(json, {"name", "system", "beta", "players", "history"}, "tournament");
  std::vector<Player> players;
  const Json& list = member(json, "players");
  if (!list.is_array()) parseFail("'players' must be an array");
  for (const Json& p : list) players.push_back(playerFromJson(p));
  std::vector<MatchRecord> history;
  if (json.contains("history")) {
    const Json& h = json.at("history");
    if (!h.is_array()) parseFail("'history' must be an array");
    for (const Json& r : h) history.push_back(matchRecordFromJson(r));
  }
  return TournamentState::replay(get<std::string>(json, "name"),
                                 parsePairingSystem(get<std::string>(json, "system")),
                                 get<double>(json, "beta"), std::move(players), history);
}

Json toJson(const Pairing& pairing, const TournamentState& state) {
  Json boards = Json::array();
  for (std::size_t i = 0; i < pairing.boards.size(); ++i) {
    const Board& b = pairing.boards[i];
    const bool isFloat = std::find(pairing.floats.begin(), pairing.floats.end(), i) !=
                         pairing.floats.end();
    Json board{{"board", i + 1}, {"white", b.white}, {"black", b.black}, {"float", isFloat}};
    if (state.contains(b.white) && state.contains(b.black)) {
      board["whitePoints"] = state.state(b.white).points();
      board["blackPoints"] = state.state(b.black).points();
    }
    boards.push_back(std::move(board));
  }
  Json json{{"round", pairing.round}, {"boards", std::move(boards)}};
  json["bye"] = pairing.bye ? Json(*pairing.bye) : Json(nullptr);
  json["floats"] = pairing.floats;
  json["fallbackUsed"] = pairing.fallbackUsed;
  return json;
}

Pairing pairingFromJson(const Json& json) {
  Pairing p;
  p.round = get<int>(json, "round");
  const Json& boards = member(json, "boards");
  if (!boards.is_array()) parseFail("'boards' must be an array");
  for (const Json& b : boards)
    p.boards.push_back({get<std::string>(b, "white"), get<std::string>(b, "black")});
  if (json.contains("bye") && !json.at("bye").is_null()) p.bye = get<std::string>(json, "bye");
  getIfPresent(json, "floats", p.floats);
  for (std::size_t f : p.floats)
    if (f >= p.boards.size()) parseFail("float index out of range");
  getIfPresent(json, "fallbackUsed", p.fallbackUsed);
  return p;
}

Json standingsJson(const TournamentState& state, const TiebreakConfig& config) {
  const Ranking ranking = finalRanking(state, config);
  Json rows = Json::array();
  int rank = 0;
  for (const PlayerId& id : ranking.orderedIds) {
    const Player& p = state.player(id);
    const PlayerState& s = state.state(id);
    rows.push_back(Json{{"rank", ++rank},
                        {"id", id},
                        {"name", p.name},
                        {"elo", p.elo},
                        {"points", s.points()},
                        {"cd", s.colorDiff},
                        {"buchholz", buchholz(state, id) / 2.0},
                        {"bye", s.byeReceived}});
  }
  return Json{{"round", state.roundsPlayed()}, {"standings", std::move(rows)}};
}

Json toJson(const StrengthDistributionSpec& spec) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformStrength>) {
          return Json{{"kind", "uniform"}, {"lo", s.lo}, {"hi", s.hi}};
        } else if constexpr (std::is_same_v<T, ExponentialStrength>) {
          return Json{{"kind", "exponential"}, {"lo", s.lo}, {"hi", s.hi}, {"mean", s.mean}};
        } else if constexpr (std::is_same_v<T, NormalStrength>) {
          return Json{{"kind", "normal"}, {"lo", s.lo}, {"hi", s.hi}, {"mean", s.mean}, {"sd", s.sd}};
        } else {
          return Json{{"kind", "empirical"}, {"file", s.file}, {"lo", s.lo}, {"hi", s.hi}};
        }
      },
      spec);
}

StrengthDistributionSpec strengthFromJson(const Json& json) {
  if (json.is_string()) return parseStrengthSpec(json.get<std::string>());
  const auto kind = get<std::string>(json, "kind");
  StrengthDistributionSpec spec;
  if (kind == "uniform") {
    rejectUnknown(json, {"kind", "lo", "hi"}, "strength");
    spec = UniformStrength{get<double>(json, "lo"), get<double>(json, "hi")};
  } else if (kind == "exponential") {
    rejectUnknown(json, {"kind", "lo", "hi", "mean"}, "strength");
    spec = ExponentialStrength{get<double>(json, "lo"), get<double>(json, "hi"),
                               get<double>(json, "mean")};
  } else if (kind == "normal") {
    rejectUnknown(json, {"kind", "lo", "hi", "mean", "sd"}, "strength");
    spec = NormalStrength{get<double>(json, "lo"), get<double>(json, "hi"),
                          get<double>(json, "mean"), get<double>(json, "sd")};
  } else if (kind == "empirical") {
    rejectUnknown(json, {"kind", "file", "lo", "hi"}, "strength");
    EmpiricalStrength e;
    e.file = get<std::string>(json, "file");
    e.lo = get<double>(json, "lo");
    e.hi = get<double>(json, "hi");
    for (double v : loadRatingFile(e.file))
      if (v >= e.lo && v <= e.hi) e.values.push_back(v);
    spec = std::move(e);
  } else {
    parseFail("unknown strength kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

Json toJson(const ExperimentConfig& c) {
  Json systems = Json::array();
  for (PairingSystem s : c.systems) systems.push_back(std::string(to_string(s)));
  return Json{{"players", c.players},
              {"rounds", c.rounds},
              {"systems", std::move(systems)},
              {"beta", c.beta},
              {"strength", toJson(c.strength)},
              {"samples", c.samples},
              {"masterSeed", c.masterSeed},
              {"mode", c.mode == ExperimentMode::Standard ? "standard" : "replay_first_round"},
              {"outerTournaments", c.outerTournaments},
              {"innerReplays", c.innerReplays},
              {"threads", c.threads},
              {"computeNormalized", c.computeNormalized},
              {"exponent", c.exponent},
              {"outcome",
               {{"whiteAdvantage", c.outcome.whiteAdvantage},
                {"advantageDecay", c.outcome.advantageDecay},
                {"eloScale", c.outcome.eloScale},
                {"drawBase", c.outcome.drawBase},
                {"drawSlope", c.outcome.drawSlope}}}};
}

ExperimentConfig experimentConfigFromJson(const Json& json) {
  rejectUnknown(json,
                {"players", "rounds", "systems", "beta", "strength", "samples", "masterSeed", "mode",
                 "outerTournaments", "innerReplays", "threads", "computeNormalized", "exponent",
                 "outcome"},
                "experiment config");
  ExperimentConfig c;
  getIfPresent(json, "players", c.players);
  getIfPresent(json, "rounds", c.rounds);
  if (json.contains("systems")) {
    const Json& list = json.at("systems");
    if (list.is_string() && list.get<std::string>() == "all") {
      c.systems.assign(kAllSystems.begin(), kAllSystems.end());
    } else {
      if (!list.is_array()) parseFail("'systems' must be an array or \"all\"");
      c.systems.clear();
      for (const Json& s : list) {
        if (!s.is_string()) parseFail("system names must be strings");
        c.systems.push_back(parsePairingSystem(s.get<std::string>()));
      }
    }
  }
  getIfPresent(json, "beta", c.beta);
  if (json.contains("strength")) c.strength = strengthFromJson(json.at("strength"));
  getIfPresent(json, "samples", c.samples);
  getIfPresent(json, "masterSeed", c.masterSeed);
  if (json.contains("mode")) {
    const auto mode = get<std::string>(json, "mode");
    if (mode == "standard") {
      c.mode = ExperimentMode::Standard;
    } else if (mode == "replay_first_round") {
      c.mode = ExperimentMode::ReplayFirstRound;
    } else {
      parseFail("unknown mode '" + mode + "'");
    }
  }
  getIfPresent(json, "outerTournaments", c.outerTournaments);
  getIfPresent(json, "innerReplays", c.innerReplays);
  getIfPresent(json, "threads", c.threads);
  getIfPresent(json, "computeNormalized", c.computeNormalized);
  getIfPresent(json, "exponent", c.exponent);
  if (json.contains("outcome")) {
    const Json& o = json.at("outcome");
    rejectUnknown(o, {"whiteAdvantage", "advantageDecay", "eloScale", "drawBase", "drawSlope"},
                  "outcome");
    getIfPresent(o, "whiteAdvantage", c.outcome.whiteAdvantage);
    getIfPresent(o, "advantageDecay", c.outcome.advantageDecay);
    getIfPresent(o, "eloScale", c.outcome.eloScale);
    getIfPresent(o, "drawBase", c.outcome.drawBase);
    getIfPresent(o, "drawSlope", c.outcome.drawSlope);
  }
  return c;
}

Json parseJson(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parseFail(std::string("malformed JSON: ") + e.what());
  }
}

Json readJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    parseFail(path.string() + ": " + e.what());
  }
}

void writeFileAtomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  auto temp = path;
  temp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) fail(ErrorCode::IoError, "cannot write " + temp.string() + ": " + std::strerror(errno));
  std::size_t written = 0;
  while (written < content.size()) {
    const ssize_t n = ::write(fd, content.data() + written, content.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string reason = std::strerror(errno);
      ::close(fd);
      ::unlink(temp.c_str());
      fail(ErrorCode::IoError, "cannot write " + temp.string() + ": " + reason);
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  if (::rename(temp.c_str(), path.c_str()) != 0) {
    const std::string reason = std::strerror(errno);
    ::unlink(temp.c_str());
    fail(ErrorCode::IoError, "cannot replace " + path.string() + ": " + reason);
  }
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

TournamentState loadTournament(const std::filesystem::path& path) {
  return tournamentFromJson(readJsonFile(path));
}

void saveTournament(const std::filesystem::path& path, const TournamentState& state) {
  writeFileAtomic(path, toJson(state).dump(2) + "\n");
}

}  // namespace swiss
