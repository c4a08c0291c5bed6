#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "swiss/io.hpp"
#include "swiss/matching.hpp"
#include "swiss/metrics.hpp"
#include "swiss/outcome.hpp"
#include "swiss/pairing.hpp"
#include "swiss/simulator.hpp"

namespace py = pybind11;
using namespace swiss;

namespace {

Ranking rankingOf(const std::vector<std::string>& ids) { return Ranking{ids}; }

std::string pairJson(const std::string& tournament, std::uint64_t seed,
                     std::optional<std::string> system, std::optional<double> beta) {
  const TournamentState state = tournamentFromJson(parseJson(tournament));
  const PairingSystem s = system ? parsePairingSystem(*system) : state.system();
  const double b = beta ? *beta : state.beta();
  Rng rng(seed);
  return toJson(computePairing(state, s, b, rng), state).dump();
}

std::string experimentJson(const std::string& config) {
  const ExperimentConfig c = experimentConfigFromJson(parseJson(config));
  SampleTable table;
  {
    py::gil_scoped_release release;
    table = runExperiment(c);
  }
  Json rows = Json::array();
  for (const SampleRow& r : table.rows) {
    const MetricRow& m = r.metrics;
    Json row{{"sample_id", r.sampleIndex}, {"system", std::string(to_string(r.system))},
             {"seed", r.seed}, {"failed", m.failed}};
    if (m.failed) {
      row["error"] = m.error;
    } else {
      row["kendall_tau"] = m.kendallTau;
      row["spearman_rho"] = m.spearmanRho;
      row["ndcg"] = m.ndcg;
      row["float_pairs"] = m.floatPairs;
      row["paradoxical"] = m.paradoxicalProportion;
      row["mean_sd"] = m.meanStrengthDiff;
      row["normalized_sd"] = std::isnan(m.normalizedStrengthDiff) ? Json(nullptr)
                                                                   : Json(m.normalizedStrengthDiff);
      row["acd"] = m.acdByRound;
      row["fallback_used"] = m.fallbackUsed;
    }
    rows.push_back(std::move(row));
  }
  Json summary = Json::array();
  for (const SummaryRow& s : summarize(table)) {
    summary.push_back(Json{{"system", std::string(to_string(s.system))},
                           {"metric", s.metric},
                           {"count", s.stats.count},
                           {"mean", s.stats.mean},
                           {"sd", s.stats.sd},
                           {"median", s.stats.median},
                           {"ci_low", s.stats.ciLow},
                           {"ci_high", s.stats.ciHigh}});
  }
  std::ostringstream csv;
  writeSampleCsv(csv, table);
  return Json{{"rows", rows}, {"summary", summary}, {"csv", csv.str()}}.dump();
}

std::string studyJson(const std::string& config) {
  ExperimentConfig c = experimentConfigFromJson(parseJson(config));
  c.mode = ExperimentMode::ReplayFirstRound;
  std::vector<CorrelationRow> rows;
  {
    py::gil_scoped_release release;
    rows = runCorrelationStudy(c);
  }
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back(Json{{"outer_id", r.outerIndex},
                       {"seed", r.seed},
                       {"pearson", r.pearson ? Json(*r.pearson) : Json(nullptr)}});
  }
  return out.dump();
}

py::tuple matching(int vertexCount, const std::vector<std::tuple<int, int, double>>& edges) {
  WeightedGraph g;
  g.vertexCount = vertexCount;
  for (auto [u, v, w] : edges) g.edges.push_back({u, v, w});
  const PerfectMatching m = maxWeightPerfectMatching(g);
  return py::make_tuple(m.pairs, m.totalWeight);
}

}  // namespace

PYBIND11_MODULE(_swiss_mwm, m) {
  m.doc() = "Swiss-system pairing via maximum weight perfect matching";

  // Messages read "Code: detail"; the Python package splits the code off.
  py::register_exception<SwissError>(m, "SwissError", PyExc_ValueError);

  m.def("pair", &pairJson, py::arg("tournament"), py::arg("seed") = 1,
        py::arg("system") = py::none(), py::arg("beta") = py::none(),
        "Next-round pairing of a tournament document (JSON text); returns JSON text.");
  m.def("run_experiment", &experimentJson, py::arg("config"),
        "Runs an experiment config (JSON text); returns rows, summary and CSV as JSON text.");
  m.def("correlation_study", &studyJson, py::arg("config"));
  m.def("max_weight_perfect_matching", &matching, py::arg("vertex_count"), py::arg("edges"));
  m.def(
      "outcome_distribution",
      [](double white, double black) {
        const auto d = outcomeDistribution(white, black);
        return py::make_tuple(d.pWhiteWin, d.pDraw, d.pBlackWin);
      },
      py::arg("white"), py::arg("black"));
  m.def("kendall_tau", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return kendallTau(rankingOf(a), rankingOf(b));
  });
  m.def("spearman_rho", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return spearmanRho(rankingOf(a), rankingOf(b));
  });
  m.def("ndcg", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return ndcg(rankingOf(a), rankingOf(b));
  });
  m.def("replication_seed", &replicationSeed, py::arg("master_seed"), py::arg("stream"),
        py::arg("index"));
}
