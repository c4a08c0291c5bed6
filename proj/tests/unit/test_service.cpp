#include "doctest.h"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <thread>

#include "../support/worked_example.hpp"
#include "httplib.h"
#include "swiss/service.hpp"

using namespace swiss;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("swiss_service_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Json examplePlayersBody() {
  Json players = Json::array();
  for (const auto& p : fixture::examplePlayers())
    players.push_back(Json{{"id", p.id}, {"name", p.name}, {"elo", p.elo}});
  return Json{{"players", players}};
}

int statusOf(auto fn) {
  try {
    fn();
  } catch (const ApiError& e) {
    return e.status();
  } catch (const SwissError& e) {
    return httpStatusFor(e.code());
  }
  return 200;
}

Json resultsFor(const Json& pairing, const std::set<std::string>& winners) {
  Json results = Json::array();
  for (const auto& b : pairing["boards"]) {
    const auto white = b["white"].get<std::string>();
    const auto black = b["black"].get<std::string>();
    const char* result = winners.count(white) ? "1-0" : winners.count(black) ? "0-1" : "1/2";
    results.push_back(Json{{"board", b["board"]}, {"result", result}});
  }
  return Json{{"results", results}};
}

fixture::BoardSet boardsOf(const Json& pairing) {
  fixture::BoardSet out;
  for (const auto& b : pairing["boards"]) {
    auto w = b["white"].get<std::string>();
    auto k = b["black"].get<std::string>();
    out.emplace(std::min(w, k), std::max(w, k));
  }
  return out;
}

}  // namespace

TEST_CASE("fresh Dutch group pairs top half against bottom half") {
  TempDir dir;
  TournamentService service(dir.path);
  const auto created = service.create(Json{{"name", "open"}, {"system", "Dutch"}, {"beta", 2}});
  const std::string id = created["id"];
  CHECK(id == "t-1");
  CHECK(created["status"] == "NotStarted");
  service.addPlayers(id, examplePlayersBody());
  const auto pairing = service.pairNextRound(id, Json::object());
  CHECK(boardsOf(pairing) == fixture::unordered({{"p1", "p5"}, {"p2", "p6"}, {"p3", "p7"}, {"p4", "p8"}}));
  CHECK(service.get(id)["status"] == "Paired");
}

TEST_CASE("state machine conflicts") {
  TempDir dir;
  TournamentService service(dir.path);
  const std::string id = service.create(Json{{"name", "sm"}})["id"];
  CHECK(statusOf([&] { service.pairNextRound(id, {}); }) == 409);
  service.addPlayers(id, examplePlayersBody());
  CHECK(statusOf([&] { service.submitResults(id, 1, Json{{"board", 1}, {"result", "1-0"}}); }) == 409);
  const auto pairing = service.pairNextRound(id, {});
  CHECK(statusOf([&] { service.addPlayers(id, Json{{"name", "late"}, {"elo", 1500}}); }) == 409);

  auto results = resultsFor(pairing, {"p1", "p2", "p3", "p4"});
  Json three = Json{{"results", Json::array({results["results"][0], results["results"][1],
                                             results["results"][2]})}};
  service.submitResults(id, 1, three);
  CHECK(service.get(id)["status"] == "Paired");
  CHECK(statusOf([&] { service.pairNextRound(id, {}); }) == 409);
  CHECK(statusOf([&] { service.submitResults(id, 2, three); }) == 409);
  service.submitResults(id, 1, Json{{"results", Json::array({results["results"][3]})}});
  CHECK(service.get(id)["status"] == "Complete");
  CHECK(statusOf([&] { service.submitResults(id, 1, three); }) == 409);
  CHECK(service.pairNextRound(id, {})["round"] == 2);
  CHECK(statusOf([&] { service.addPlayers(id, Json{{"name", "late"}, {"elo", 1500}}); }) == 409);
}

TEST_CASE("invalid bodies and unknown ids") {
  TempDir dir;
  TournamentService service(dir.path);
  CHECK(statusOf([&] { service.create(Json{{"system", "Dutch"}}); }) == 422);
  CHECK(statusOf([&] { service.create(Json{{"name", "x"}, {"system", "Swiss"}}); }) == 422);
  CHECK(statusOf([&] { service.create(Json{{"name", "x"}, {"beta", -1}}); }) == 422);
  CHECK(statusOf([&] { service.get("t-99"); }) == 404);
  CHECK(statusOf([&] { service.addPlayers("t-99", examplePlayersBody()); }) == 404);
  const std::string id = service.create(Json{{"name", "x"}})["id"];
  CHECK(statusOf([&] { service.addPlayers(id, Json{{"name", "a"}}); }) == 422);
  CHECK(statusOf([&] { service.addPlayers(id, Json{{"name", "a"}, {"elo", "high"}}); }) == 422);
  CHECK(statusOf([&] {
          service.addPlayers(id, Json{{"name", "a"}, {"elo", 1500}, {"trueStrength", 1500}});
        }) == 422);
  service.addPlayers(id, Json{{"id", "a"}, {"elo", 1500}});
  CHECK(statusOf([&] { service.addPlayers(id, Json{{"id", "a"}, {"elo", 1600}}); }) == 422);
  service.addPlayers(id, Json{{"elo", 1600}});
  service.pairNextRound(id, {});
  CHECK(statusOf([&] { service.submitResults(id, 1, Json{{"board", 2}, {"result", "1-0"}}); }) == 422);
  CHECK(statusOf([&] { service.submitResults(id, 1, Json{{"board", 1}, {"result", "2-0"}}); }) == 422);
  CHECK(statusOf([&] { service.preview(id, "Nope", std::nullopt, std::nullopt); }) == 422);
  CHECK(statusOf([&] { service.preview(id, std::nullopt, "zero", std::nullopt); }) == 422);
}

TEST_CASE("odd roster surfaces the bye and applies it with the round") {
  TempDir dir;
  TournamentService service(dir.path);
  const std::string id = service.create(Json{{"name", "odd"}, {"system", "Monrad"}})["id"];
  auto body = examplePlayersBody();
  body["players"].erase(7);
  service.addPlayers(id, body);
  const auto pairing = service.pairNextRound(id, {});
  CHECK(pairing["bye"] == "p7");
  CHECK(pairing["boards"].size() == 3);
  service.submitResults(id, 1, resultsFor(pairing, {}));
  const auto record = service.get(id);
  CHECK(record["tournament"]["history"][0] == Json{{"round", 1}, {"bye", "p7"}});
  CHECK(service.snapshot(id)->state.state("p7").scoreHalfPoints == 2);
}

TEST_CASE("preview is pure") {
  TempDir dir;
  TournamentService service(dir.path);
  const std::string id = service.create(Json{{"name", "what-if"}})["id"];
  service.addPlayers(id, examplePlayersBody());
  service.submitResults(id, 1, resultsFor(service.pairNextRound(id, {}), {"p1", "p2", "p7", "p8"}));
  const auto before = service.get(id).dump();
  const auto fileBefore = readJsonFile(dir.path / (id + ".json")).dump();

  const auto wide = service.preview(id, std::nullopt, "2", std::nullopt);
  const auto tight = service.preview(id, std::nullopt, "0.1", std::nullopt);
  const auto burstein = service.preview(id, "Burstein", std::nullopt, "5");
  CHECK(wide["round"] == 2);
  CHECK(tight["beta"] == 0.1);
  CHECK(burstein["system"] == "Burstein");
  const auto state = service.snapshot(id)->state;
  for (const auto& b : tight["boards"]) {
    CHECK(state.state(b["white"]).colorDiff == -1);
    CHECK(state.state(b["black"]).colorDiff == 1);
  }
  CHECK(service.get(id).dump() == before);
  CHECK(readJsonFile(dir.path / (id + ".json")).dump() == fileBefore);
  CHECK(service.preview(id, std::nullopt, "0.1", std::nullopt) == tight);
}

TEST_CASE("worked example through the service with reloads") {
  TempDir dir;
  std::string id;
  {
    TournamentService service(dir.path);
    id = service.create(Json{{"name", "example"}})["id"];
    service.addPlayers(id, examplePlayersBody());
  }
  const auto boards = fixture::exampleBoards();
  const auto winners = fixture::exampleWinners();
  for (int round = 1; round <= 4; ++round) {
    Json before;
    {
      TournamentService service(dir.path);
      Json body = Json::object();
      if (round == 1) body["seed"] = fixture::exampleRound1Seed();
      const auto pairing = service.pairNextRound(id, body);
      CHECK(boardsOf(pairing) == boards[round - 1]);
      auto results = resultsFor(pairing, winners[round - 1]);
      service.submitResults(id, round, Json{{"results", Json::array({results["results"][0]})}});
      before = service.get(id);
    }
    TournamentService service(dir.path);
    CHECK(service.get(id) == before);
    const auto pairing = service.get(id)["pairing"];
    service.submitResults(id, round, resultsFor(pairing, winners[round - 1]));
  }
  TournamentService service(dir.path);
  const auto standings = service.standings(id);
  CHECK(standings["round"] == 4);
  for (auto [pid, score] : fixture::exampleFinalScores()) {
    bool seen = false;
    for (const auto& row : standings["standings"]) {
      if (row["id"] == pid) {
        CHECK(row["points"] == score / 2.0);
        seen = true;
      }
    }
    CHECK(seen);
  }
  CHECK(service.create(Json{{"name", "second"}})["id"] == "t-2");
}

TEST_CASE("HTTP routes") {
  TempDir dir;
  TournamentService service(dir.path);
  httplib::Server server;
  registerRoutes(server, service);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(Json::parse(health->body)["status"] == "ok");

  auto created = client.Post("/api/tournaments", R"({"name": "web", "system": "Burstein"})",
                             "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string id = Json::parse(created->body)["id"];
  const std::string base = "/api/tournaments/" + id;

  auto added = client.Post(base + "/players", examplePlayersBody().dump(), "application/json");
  CHECK(added->status == 200);
  auto paired = client.Post(base + "/rounds", "", "application/json");
  CHECK(paired->status == 201);
  const auto pairing = Json::parse(paired->body);
  CHECK(boardsOf(pairing) == fixture::unordered({{"p1", "p8"}, {"p2", "p7"}, {"p3", "p6"}, {"p4", "p5"}}));

  auto again = client.Post(base + "/rounds", "{}", "application/json");
  CHECK(again->status == 409);
  CHECK(Json::parse(again->body)["code"] == "RoundOpen");

  auto bad = client.Put(base + "/rounds/1/results", "{not json", "application/json");
  CHECK(bad->status == 422);
  CHECK(Json::parse(bad->body).contains("message"));
  auto wrongRound = client.Put(base + "/rounds/3/results", resultsFor(pairing, {}).dump(), "application/json");
  CHECK(wrongRound->status == 409);
  auto done = client.Put(base + "/rounds/1/results", resultsFor(pairing, {"p1", "p2", "p3", "p4"}).dump(),
                         "application/json");
  CHECK(done->status == 200);
  CHECK(Json::parse(done->body)["status"] == "Complete");

  auto standings = client.Get(base + "/standings");
  CHECK(standings->status == 200);
  CHECK(Json::parse(standings->body)["standings"][0]["points"] == 1.0);
  auto preview = client.Get(base + "/preview?system=Dutch&beta=0.1");
  CHECK(preview->status == 200);
  CHECK(Json::parse(preview->body)["system"] == "Dutch");
  auto missing = client.Get("/api/tournaments/t-404");
  CHECK(missing->status == 404);
  CHECK(Json::parse(missing->body)["code"] == "NotFound");
  auto listed = client.Get("/api/tournaments");
  CHECK(Json::parse(listed->body).size() == 1);

  server.stop();
  thread.join();
}
