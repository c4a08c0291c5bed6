#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace swiss {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

/// Undirected simple graph on vertices 0..vertexCount-1.
struct WeightedGraph {
  int vertexCount = 0;
  std::vector<WeightedEdge> edges;

  /// Throws InvalidGraph on self loops, duplicate pairs, out-of-range
  /// endpoints or non-finite weights.
  void validate() const;
};

struct PerfectMatching {
  /// Vertex pairs with first < second, sorted by first.
  std::vector<std::pair<int, int>> pairs;
  /// Index into WeightedGraph::edges for each entry of `pairs`.
  std::vector<std::size_t> edgeIndices;
  double totalWeight = 0.0;
};

/// Exact maximum weight perfect matching (Edmonds' blossom algorithm with
/// dual variables, O(n^3)). Weights may be negative; perfectness is mandatory.
/// Throws NoPerfectMatching if the graph has none, InvalidGraph for an odd
/// vertex count or malformed edges.
PerfectMatching maxWeightPerfectMatching(const WeightedGraph& graph);

inline constexpr int kEnumerationLimit = 14;

/// Calls `visit` once for every perfect matching of `graph`.
/// Throws TooLarge above kEnumerationLimit vertices.
void enumeratePerfectMatchings(const WeightedGraph& graph,
                               const std::function<void(const PerfectMatching&)>& visit);

/// Reference optimum by exhaustive enumeration. Among equal-weight optima the
/// lexicographically smallest sorted pair list is returned.
PerfectMatching oracleMaxMatching(const WeightedGraph& graph);

}  // namespace swiss
