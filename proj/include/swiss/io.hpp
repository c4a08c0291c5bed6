#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "swiss/core.hpp"
#include "swiss/metrics.hpp"
#include "swiss/pairing.hpp"
#include "swiss/simulator.hpp"

namespace swiss {

using Json = nlohmann::ordered_json;

Json toJson(const Player& player);
Json toJson(const MatchRecord& record);

/// {name, system, beta, players:[{id,name,elo,lotOrder}], history:[...]}.
Json toJson(const TournamentState& state);

/// Live tournament files carry no true strengths; a `trueStrength` field is
/// rejected with ParseError. Roster and history errors keep their own codes.
TournamentState tournamentFromJson(const Json& json);
Player playerFromJson(const Json& json);
MatchRecord matchRecordFromJson(const Json& json);

/// Boards carry a `float` flag; `state` is the state the pairing was made on.
Json toJson(const Pairing& pairing, const TournamentState& state);
Pairing pairingFromJson(const Json& json);

/// Rank, id, name, elo, points, cd, buchholz for every player.
Json standingsJson(const TournamentState& state, const TiebreakConfig& config = {});

Json toJson(const StrengthDistributionSpec& spec);
StrengthDistributionSpec strengthFromJson(const Json& json);

/// Missing fields keep their defaults; unknown fields are rejected.
Json toJson(const ExperimentConfig& config);
ExperimentConfig experimentConfigFromJson(const Json& json);

/// Throws ParseError with the offending path for malformed documents.
Json readJsonFile(const std::filesystem::path& path);
Json parseJson(std::string_view text);

/// Writes to a sibling temporary file, flushes it to disk and renames it over
/// `path`, so readers never observe a partial file.
void writeFileAtomic(const std::filesystem::path& path, std::string_view content);

TournamentState loadTournament(const std::filesystem::path& path);
void saveTournament(const std::filesystem::path& path, const TournamentState& state);

}  // namespace swiss
