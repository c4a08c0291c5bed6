#include "swiss/service.hpp"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <thread>

#include "httplib.h"
#include "swiss/metrics.hpp"
#include "swiss/simulator.hpp"

namespace swiss {

std::string_view to_string(RoundStatus status) noexcept {
  switch (status) {
    case RoundStatus::NotStarted: return "NotStarted";
    case RoundStatus::Paired: return "Paired";
    case RoundStatus::Complete: return "Complete";
  }
  return "NotStarted";
}

RoundStatus parseRoundStatus(std::string_view text) {
  if (text == "NotStarted") return RoundStatus::NotStarted;
  if (text == "Paired") return RoundStatus::Paired;
  if (text == "Complete") return RoundStatus::Complete;
  fail(ErrorCode::ParseError, "unknown round status '" + std::string(text) + "'");
}

Json toJson(const TournamentRecord& record) {
  Json results = Json::array();
  for (const auto& r : record.results)
    results.push_back(r ? Json(std::string(to_string(*r))) : Json(nullptr));
  Json json{{"id", record.id},
            {"createdAt", record.createdAt},
            {"status", std::string(to_string(record.status))},
            {"tournament", toJson(record.state)}};
  json["pairing"] = record.pairing ? toJson(*record.pairing, record.state) : Json(nullptr);
  json["results"] = std::move(results);
  return json;
}

TournamentRecord recordFromJson(const Json& json) {
  TournamentRecord record;
  try {
    record.id = json.at("id").get<std::string>();
    record.createdAt = json.at("createdAt").get<std::string>();
    record.status = parseRoundStatus(json.at("status").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("bad tournament record: ") + e.what());
  }
  record.state = tournamentFromJson(json.at("tournament"));
  if (json.contains("pairing") && !json.at("pairing").is_null())
    record.pairing = pairingFromJson(json.at("pairing"));
  if (json.contains("results")) {
    for (const Json& r : json.at("results")) {
      if (r.is_null()) {
        record.results.emplace_back();
      } else if (r.is_string()) {
        record.results.emplace_back(parseGameResult(r.get<std::string>()));
      } else {
        fail(ErrorCode::ParseError, "results must be strings or null");
      }
    }
  }
  const bool paired = record.status == RoundStatus::Paired;
  if (paired != record.pairing.has_value())
    fail(ErrorCode::ParseError, "record status and open pairing disagree");
  if (paired && record.results.size() != record.pairing->boards.size())
    fail(ErrorCode::ParseError, "one result slot per board expected");
  return record;
}

int httpStatusFor(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RepeatedPairing:
    case ErrorCode::DuplicateBye:
    case ErrorCode::AllPlayersHadBye:
    case ErrorCode::NoLegalPairing:
    case ErrorCode::NoPerfectMatching:
      return 409;
    case ErrorCode::InvariantViolation:
    case ErrorCode::IoError:
    case ErrorCode::EncodingOverflow:
      return 500;
    default:
      return 422;
  }
}

namespace {

[[noreturn]] void notFound(const std::string& id) {
  throw ApiError(404, "NotFound", "no tournament '" + id + "'");
}

[[noreturn]] void conflict(const std::string& code, const std::string& message) {
  throw ApiError(409, code, message);
}

[[noreturn]] void invalid(const std::string& message) {
  throw ApiError(422, "InvalidBody", message);
}

std::string nowUtc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

template <typename T>
T bodyField(const Json& body, const char* key, T fallback) {
  if (!body.contains(key) || body.at(key).is_null()) return fallback;
  try {
    return body.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

std::uint64_t parseSeed(const std::string& text) {
  std::uint64_t seed = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) invalid("seed must be an unsigned integer");
  return seed;
}

double parseBeta(const std::string& text) {
  double beta = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), beta);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(beta > 0.0))
    invalid("beta must be a positive number");
  return beta;
}

int idNumber(const std::string& id) {
  if (id.size() < 3 || id.compare(0, 2, "t-") != 0) return 0;
  int n = 0;
  auto [ptr, ec] = std::from_chars(id.data() + 2, id.data() + id.size(), n);
  return ec == std::errc() && ptr == id.data() + id.size() ? n : 0;
}

std::uint64_t defaultSeed(const std::string& id, int round) {
  return replicationSeed(0, id, static_cast<std::uint64_t>(round));
}

}  // namespace

TournamentService::TournamentService(std::filesystem::path dataDir) : dataDir_(std::move(dataDir)) {
  std::error_code ec;
  std::filesystem::create_directories(dataDir_, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dataDir_.string() + ": " + ec.message());
  for (const auto& file : std::filesystem::directory_iterator(dataDir_)) {
    if (!file.is_regular_file() || file.path().extension() != ".json") continue;
    TournamentRecord record = recordFromJson(readJsonFile(file.path()));
    nextId_ = std::max(nextId_, idNumber(record.id) + 1);
    auto e = std::make_shared<Entry>();
    const std::string id = record.id;
    e->current = std::make_shared<const TournamentRecord>(std::move(record));
    entries_.emplace(id, std::move(e));
  }
}

std::filesystem::path TournamentService::fileFor(const std::string& id) const {
  return dataDir_ / (id + ".json");
}

std::shared_ptr<TournamentService::Entry> TournamentService::entry(const std::string& id) const {
  std::shared_lock lock(registryMutex_);
  auto it = entries_.find(id);
  if (it == entries_.end()) notFound(id);
  return it->second;
}

std::shared_ptr<const TournamentRecord> TournamentService::snapshot(const std::string& id) const {
  return entry(id)->load();
}

void TournamentService::commit(Entry& e, TournamentRecord record) {
  writeFileAtomic(fileFor(record.id), toJson(record).dump(2) + "\n");
  auto next = std::make_shared<const TournamentRecord>(std::move(record));
  std::lock_guard lock(e.swap);
  e.current = std::move(next);
}

Json TournamentService::create(const Json& body) {
  if (!body.is_object()) invalid("expected a JSON object");
  const auto name = bodyField<std::string>(body, "name", "");
  if (name.empty()) invalid("a tournament needs a name");
  const auto system = parsePairingSystem(bodyField<std::string>(body, "system", "Dutch"));
  const double beta = bodyField<double>(body, "beta", 2.0);

  TournamentRecord record;
  {
    std::unique_lock lock(registryMutex_);
    record.id = "t-" + std::to_string(nextId_++);
  }
  record.createdAt = nowUtc();
  record.state = TournamentState::create(name, system, beta, {});
  auto e = std::make_shared<Entry>();
  commit(*e, record);
  {
    std::unique_lock lock(registryMutex_);
    entries_.emplace(record.id, e);
  }
  if (body.contains("players")) return addPlayers(record.id, body);
  return toJson(record);
}

Json TournamentService::addPlayers(const std::string& id, const Json& body) {
  auto e = entry(id);
  std::lock_guard lock(e->write);
  const auto current = e->load();
  if (current->status != RoundStatus::NotStarted || current->state.roundsPlayed() > 0)
    conflict("RosterLocked", "players can only be added before round 1 is paired");

  Json list;
  if (body.is_array()) {
    list = body;
  } else if (body.is_object() && body.contains("players")) {
    list = body.at("players");
  } else if (body.is_object()) {
    list = Json::array({body});
  }
  if (!list.is_array() || list.empty()) invalid("expected a player or a list of players");

  std::vector<Player> players = current->state.players();
  for (const Json& p : list) {
    if (!p.is_object()) invalid("players must be objects");
    if (p.contains("trueStrength")) invalid("true strengths are not accepted in live tournaments");
    Player player;
    player.name = bodyField<std::string>(p, "name", "");
    player.elo = bodyField<int>(p, "elo", -1);
    if (player.elo < 0) invalid("every player needs a non-negative integer elo");
    player.lotOrder = static_cast<int>(players.size()) + 1;
    player.id = bodyField<std::string>(p, "id", "p" + std::to_string(player.lotOrder));
    if (player.name.empty()) player.name = player.id;
    players.push_back(std::move(player));
  }
  TournamentRecord next = *current;
  next.state = TournamentState::create(current->state.name(), current->state.system(),
                                       current->state.beta(), std::move(players));
  commit(*e, next);
  return toJson(next);
}

Json TournamentService::pairNextRound(const std::string& id, const Json& body) {
  auto e = entry(id);
  std::lock_guard lock(e->write);
  const auto current = e->load();
  if (current->status == RoundStatus::Paired)
    conflict("RoundOpen", "round " + std::to_string(current->pairing->round) +
                              " still has unreported results");
  if (current->state.playerCount() < 2) conflict("NotEnoughPlayers", "at least two players are needed");

  const int round = current->state.roundsPlayed() + 1;
  std::uint64_t seed = defaultSeed(id, round);
  if (body.is_object() && body.contains("seed") && !body.at("seed").is_null()) {
    const Json& s = body.at("seed");
    if (s.is_number_unsigned()) {
      seed = s.get<std::uint64_t>();
    } else if (s.is_string()) {
      seed = parseSeed(s.get<std::string>());
    } else {
      invalid("seed must be an unsigned integer");
    }
  }
  Rng rng(seed);
  TournamentRecord next = *current;
  next.pairing = computePairing(current->state, rng);
  next.results.assign(next.pairing->boards.size(), std::nullopt);
  next.status = RoundStatus::Paired;
  commit(*e, next);
  Json out = toJson(*next.pairing, next.state);
  out["seed"] = seed;
  return out;
}

Json TournamentService::submitResults(const std::string& id, int round, const Json& body) {
  auto e = entry(id);
  std::lock_guard lock(e->write);
  const auto current = e->load();
  if (current->status != RoundStatus::Paired || current->pairing->round != round)
    conflict("RoundNotOpen", "round " + std::to_string(round) + " is not open for results");

  Json list;
  if (body.is_array()) {
    list = body;
  } else if (body.is_object() && body.contains("results")) {
    list = body.at("results");
  } else if (body.is_object()) {
    list = Json::array({body});
  }
  if (!list.is_array() || list.empty()) invalid("expected a result or a list of results");

  TournamentRecord next = *current;
  const auto& boards = next.pairing->boards;
  for (const Json& r : list) {
    if (!r.is_object()) invalid("results must be objects");
    const int board = bodyField<int>(r, "board", 0);
    if (board < 1 || board > static_cast<int>(boards.size()))
      invalid("board must lie in 1.." + std::to_string(boards.size()));
    const auto text = bodyField<std::string>(r, "result", "");
    GameResult result;
    try {
      result = parseGameResult(text);
    } catch (const SwissError& err) {
      invalid(err.what());
    }
    next.results[static_cast<std::size_t>(board - 1)] = result;
  }

  const bool complete = std::all_of(next.results.begin(), next.results.end(),
                                    [](const auto& r) { return r.has_value(); });
  if (complete) {
    std::vector<MatchRecord> records;
    if (next.pairing->bye) records.push_back(MatchRecord::bye(round, *next.pairing->bye));
    for (std::size_t i = 0; i < boards.size(); ++i)
      records.push_back(MatchRecord::game(round, boards[i].white, boards[i].black, *next.results[i]));
    next.state = applyResults(next.state, records);
    next.pairing.reset();
    next.results.clear();
    next.status = RoundStatus::Complete;
  }
  commit(*e, next);
  return toJson(next);
}

Json TournamentService::get(const std::string& id) const { return toJson(*snapshot(id)); }

Json TournamentService::standings(const std::string& id) const {
  const auto record = snapshot(id);
  Json out = standingsJson(record->state);
  out["status"] = std::string(to_string(record->status));
  return out;
}

Json TournamentService::preview(const std::string& id, std::optional<std::string> system,
                                std::optional<std::string> beta,
                                std::optional<std::string> seed) const {
  const auto record = snapshot(id);
  const TournamentState& state = record->state;
  if (state.playerCount() < 2) conflict("NotEnoughPlayers", "at least two players are needed");
  PairingSystem s = state.system();
  if (system && !system->empty()) {
    try {
      s = parsePairingSystem(*system);
    } catch (const SwissError& err) {
      invalid(err.what());
    }
  }
  const double b = beta && !beta->empty() ? parseBeta(*beta) : state.beta();
  const std::uint64_t sd =
      seed && !seed->empty() ? parseSeed(*seed) : defaultSeed(id, state.roundsPlayed() + 1);
  Rng rng(sd);
  Json out = toJson(computePairing(state, s, b, rng), state);
  out["system"] = std::string(to_string(s));
  out["beta"] = b;
  out["seed"] = sd;
  return out;
}

Json TournamentService::list() const {
  std::vector<std::shared_ptr<Entry>> all;
  {
    std::shared_lock lock(registryMutex_);
    for (const auto& [_, e] : entries_) all.push_back(e);
  }
  Json out = Json::array();
  for (const auto& e : all) {
    const auto r = e->load();
    out.push_back(Json{{"id", r->id},
                       {"name", r->state.name()},
                       {"system", std::string(to_string(r->state.system()))},
                       {"status", std::string(to_string(r->status))},
                       {"roundsPlayed", r->state.roundsPlayed()},
                       {"players", r->state.playerCount()}});
  }
  return out;
}

namespace {

void sendJson(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void sendError(httplib::Response& res, int status, const std::string& code,
               const std::string& message) {
  sendJson(res, status, Json{{"code", code}, {"message", message}});
}

Json requestBody(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ApiError(422, "InvalidBody", std::string("malformed JSON: ") + e.what());
  }
}

template <typename F>
httplib::Server::Handler guarded(F&& f, int okStatus = 200) {
  return [f = std::forward<F>(f), okStatus](const httplib::Request& req, httplib::Response& res) {
    try {
      sendJson(res, okStatus, f(req));
    } catch (const ApiError& e) {
      sendError(res, e.status(), e.code(), e.what());
    } catch (const SwissError& e) {
      sendError(res, httpStatusFor(e.code()), std::string(to_string(e.code())), e.what());
    } catch (const nlohmann::json::exception& e) {
      sendError(res, 422, "InvalidBody", e.what());
    } catch (const std::exception& e) {
      sendError(res, 500, "Internal", e.what());
    }
  };
}

std::optional<std::string> param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

}  // namespace

void registerRoutes(httplib::Server& server, TournamentService& service,
                    const std::optional<std::filesystem::path>& staticDir) {
  server.Get("/healthz", guarded([](const httplib::Request&) { return Json{{"status", "ok"}}; }));
  server.Get("/api/tournaments", guarded([&](const httplib::Request&) { return service.list(); }));
  server.Post("/api/tournaments",
              guarded([&](const httplib::Request& req) { return service.create(requestBody(req)); },
                      201));
  server.Get(R"(/api/tournaments/([^/]+))", guarded([&](const httplib::Request& req) {
               return service.get(req.matches[1]);
             }));
  server.Post(R"(/api/tournaments/([^/]+)/players)", guarded([&](const httplib::Request& req) {
                return service.addPlayers(req.matches[1], requestBody(req));
              }));
  server.Post(R"(/api/tournaments/([^/]+)/rounds)",
              guarded(
                  [&](const httplib::Request& req) {
                    return service.pairNextRound(req.matches[1], requestBody(req));
                  },
                  201));
  server.Put(R"(/api/tournaments/([^/]+)/rounds/(\d+)/results)",
             guarded([&](const httplib::Request& req) {
               int round = 0;
               const std::string text = req.matches[2];
               auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), round);
               if (ec != std::errc()) throw ApiError(404, "NotFound", "no round " + text);
               return service.submitResults(req.matches[1], round, requestBody(req));
             }));
  server.Get(R"(/api/tournaments/([^/]+)/standings)", guarded([&](const httplib::Request& req) {
               return service.standings(req.matches[1]);
             }));
  server.Get(R"(/api/tournaments/([^/]+)/preview)", guarded([&](const httplib::Request& req) {
               return service.preview(req.matches[1], param(req, "system"), param(req, "beta"),
                                      param(req, "seed"));
             }));
  if (staticDir) server.set_mount_point("/", staticDir->string());
}

bool serve(const ServeOptions& options) {
  TournamentService service(options.dataDir);
  httplib::Server server;
  registerRoutes(server, service, options.staticDir);
  // No SO_REUSEPORT: a second instance on the same port must fail to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });

  int port = options.port;
  if (port == 0) {
    port = server.bind_to_any_port(options.host);
    if (port < 0) return false;
  } else if (!server.bind_to_port(options.host, port)) {
    return false;
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    server.stop();
  });

  std::cout << "listening on http://" << options.host << ':' << port << std::endl;
  server.listen_after_bind();
  // Wakes the waiter when the server stopped for another reason.
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return true;
}

}  // namespace swiss
