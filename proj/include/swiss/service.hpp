#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "swiss/core.hpp"
#include "swiss/io.hpp"
#include "swiss/pairing.hpp"

namespace httplib {
class Server;
}

namespace swiss {

enum class RoundStatus { NotStarted, Paired, Complete };

std::string_view to_string(RoundStatus status) noexcept;
RoundStatus parseRoundStatus(std::string_view text);

struct TournamentRecord {
  std::string id;
  std::string createdAt;
  TournamentState state;
  RoundStatus status = RoundStatus::NotStarted;
  /// Open round while Paired; results are collected per board and applied to
  /// `state` together with the bye once every board is reported.
  std::optional<Pairing> pairing;
  std::vector<std::optional<GameResult>> results;
};

/// {id, createdAt, status, tournament, pairing, results}.
Json toJson(const TournamentRecord& record);
TournamentRecord recordFromJson(const Json& json);

/// Failure reported to HTTP clients as {code, message} with `status`.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

/// HTTP status for a library error: 409 for state conflicts, 422 otherwise.
int httpStatusFor(ErrorCode code) noexcept;

/// Tournament registry backed by one JSON file per tournament. Mutations on a
/// tournament are serialized by its own lock and persisted before they become
/// visible; readers work on immutable snapshots.
class TournamentService {
 public:
  /// Creates `dataDir` if needed and loads every record found there.
  explicit TournamentService(std::filesystem::path dataDir);

  Json create(const Json& body);
  Json addPlayers(const std::string& id, const Json& body);
  Json pairNextRound(const std::string& id, const Json& body);
  Json submitResults(const std::string& id, int round, const Json& body);
  Json get(const std::string& id) const;
  Json standings(const std::string& id) const;
  Json preview(const std::string& id, std::optional<std::string> system,
               std::optional<std::string> beta, std::optional<std::string> seed) const;
  Json list() const;

  std::shared_ptr<const TournamentRecord> snapshot(const std::string& id) const;
  const std::filesystem::path& dataDir() const noexcept { return dataDir_; }

 private:
  struct Entry {
    std::mutex write;
    mutable std::mutex swap;
    std::shared_ptr<const TournamentRecord> current;

    std::shared_ptr<const TournamentRecord> load() const {
      std::lock_guard lock(swap);
      return current;
    }
  };

  std::shared_ptr<Entry> entry(const std::string& id) const;
  void commit(Entry& entry, TournamentRecord record);
  std::filesystem::path fileFor(const std::string& id) const;

  std::filesystem::path dataDir_;
  mutable std::shared_mutex registryMutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
  int nextId_ = 1;
};

/// Registers the REST routes (and optionally a static file mount) on `server`.
void registerRoutes(httplib::Server& server, TournamentService& service,
                    const std::optional<std::filesystem::path>& staticDir = std::nullopt);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path dataDir = "data";
  std::optional<std::filesystem::path> staticDir;
};

/// Blocks until SIGINT or SIGTERM. Returns false when the port cannot be bound.
bool serve(const ServeOptions& options);

}  // namespace swiss
