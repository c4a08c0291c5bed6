#include "swiss/matching.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>

#include "swiss/error.hpp"

namespace swiss {

void WeightedGraph::validate() const {
  if (vertexCount < 0) fail(ErrorCode::InvalidGraph, "negative vertex count");
  std::set<std::pair<int, int>> seen;
  for (const WeightedEdge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= vertexCount || e.v >= vertexCount)
      fail(ErrorCode::InvalidGraph, "edge endpoint out of range");
    if (e.u == e.v) fail(ErrorCode::InvalidGraph, "self loop on vertex " + std::to_string(e.u));
    if (!std::isfinite(e.weight)) fail(ErrorCode::InvalidGraph, "non-finite edge weight");
    if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second)
      fail(ErrorCode::InvalidGraph, "duplicate edge {" + std::to_string(e.u) + "," +
                                        std::to_string(e.v) + "}");
  }
}

namespace {

// Primal-dual blossom algorithm for maximum weight matching, following the
// well-known formulation by Galil with the bookkeeping of van Rantwijk's
// reference implementation. Run in max-cardinality mode so that, whenever a
// perfect matching exists, the optimum among perfect matchings is found.
//
// Endpoint encoding: edge k has endpoints 2k (vertex u) and 2k+1 (vertex v);
// `p ^ 1` is the opposite endpoint of p.
class BlossomSolver {
 public:
  BlossomSolver(int n, std::vector<WeightedEdge> edges)
      : n_(n), edges_(std::move(edges)) {}

  /// mate[v] = matched vertex or -1.
  std::vector<int> solve();

  /// Reduced cost of {u, v} under the final duals (weight as passed in),
  /// including the duals of blossoms that contain both endpoints.
  double reducedCost(int u, int v, double weight) const;

 private:
  double slack(int k) const {
    const WeightedEdge& e = edges_[k];
    return dualvar_[e.u] + dualvar_[e.v] - 2.0 * e.weight;
  }

  template <typename F>
  void forEachLeaf(int b, F&& f) const {
    if (b < n_) {
      f(b);
      return;
    }
    for (int t : childs_[b]) forEachLeaf(t, f);
  }

  std::vector<int> leaves(int b) const {
    std::vector<int> out;
    forEachLeaf(b, [&](int v) { out.push_back(v); });
    return out;
  }

  static int wrap(const std::vector<int>& xs, int j) {
    const int size = static_cast<int>(xs.size());
    return xs[static_cast<std::size_t>(j < 0 ? j + size : j)];
  }

  void assignLabel(int w, int t, int p);
  int scanBlossom(int v, int w);
  void addBlossom(int base, int k);
  void expandBlossom(int b, bool endstage);
  void augmentBlossom(int b, int v);
  void augmentMatching(int k);

  int n_;
  std::vector<WeightedEdge> edges_;
  std::vector<int> endpoint_;
  std::vector<std::vector<int>> neighbend_;
  std::vector<int> mate_;
  std::vector<int> label_;
  std::vector<int> labelend_;
  std::vector<int> inblossom_;
  std::vector<int> blossomparent_;
  std::vector<std::vector<int>> childs_;
  std::vector<int> blossombase_;
  std::vector<std::vector<int>> endps_;
  std::vector<int> bestedge_;
  std::vector<std::vector<int>> blossombestedges_;
  std::vector<bool> hasBestEdges_;
  std::vector<int> unusedblossoms_;
  std::vector<double> dualvar_;
  std::vector<bool> allowedge_;
  std::vector<int> queue_;
};

void BlossomSolver::assignLabel(int w, int t, int p) {
  const int b = inblossom_[w];
  label_[w] = label_[b] = t;
  labelend_[w] = labelend_[b] = p;
  bestedge_[w] = bestedge_[b] = -1;
  if (t == 1) {
    forEachLeaf(b, [&](int v) { queue_.push_back(v); });
  } else if (t == 2) {
    const int base = blossombase_[b];
    assignLabel(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
  }
}

int BlossomSolver::scanBlossom(int v, int w) {
  std::vector<int> path;
  int base = -1;
  while (v != -1 || w != -1) {
    int b = inblossom_[v];
    if (label_[b] & 4) {
      base = blossombase_[b];
      break;
    }
    path.push_back(b);
    label_[b] = 5;
    if (labelend_[b] == -1) {
      v = -1;
    } else {
      v = endpoint_[labelend_[b]];
      b = inblossom_[v];
      v = endpoint_[labelend_[b]];
    }
    if (w != -1) std::swap(v, w);
  }
  for (int b : path) label_[b] = 1;
  return base;
}

void BlossomSolver::addBlossom(int base, int k) {
  int v = edges_[k].u;
  int w = edges_[k].v;
  const int bb = inblossom_[base];
  int bv = inblossom_[v];
  int bw = inblossom_[w];
  const int b = unusedblossoms_.back();
  unusedblossoms_.pop_back();
  blossombase_[b] = base;
  blossomparent_[b] = -1;
  blossomparent_[bb] = b;

  std::vector<int>& path = childs_[b];
  std::vector<int>& endps = endps_[b];
  path.clear();
  endps.clear();
  while (bv != bb) {
    blossomparent_[bv] = b;
    path.push_back(bv);
    endps.push_back(labelend_[bv]);
    v = endpoint_[labelend_[bv]];
    bv = inblossom_[v];
  }
  path.push_back(bb);
  std::reverse(path.begin(), path.end());
  std::reverse(endps.begin(), endps.end());
  endps.push_back(2 * k);
  while (bw != bb) {
    blossomparent_[bw] = b;
    path.push_back(bw);
    endps.push_back(labelend_[bw] ^ 1);
    w = endpoint_[labelend_[bw]];
    bw = inblossom_[w];
  }

  label_[b] = 1;
  labelend_[b] = labelend_[bb];
  dualvar_[b] = 0.0;
  forEachLeaf(b, [&](int leaf) {
    if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
    inblossom_[leaf] = b;
  });

  std::vector<int> bestedgeto(static_cast<std::size_t>(2 * n_), -1);
  for (int child : path) {
    std::vector<std::vector<int>> nblists;
    if (!hasBestEdges_[child]) {
      forEachLeaf(child, [&](int leaf) {
        std::vector<int> list;
        list.reserve(neighbend_[leaf].size());
        for (int p : neighbend_[leaf]) list.push_back(p / 2);
        nblists.push_back(std::move(list));
      });
    } else {
      nblists.push_back(blossombestedges_[child]);
    }
    for (const auto& nblist : nblists) {
      for (int kk : nblist) {
        int i = edges_[kk].u;
        int j = edges_[kk].v;
        if (inblossom_[j] == b) std::swap(i, j);
        const int bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 &&
            (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
          bestedgeto[bj] = kk;
        }
      }
    }
    blossombestedges_[child].clear();
    hasBestEdges_[child] = false;
    bestedge_[child] = -1;
  }
  blossombestedges_[b].clear();
  for (int kk : bestedgeto) {
    if (kk != -1) blossombestedges_[b].push_back(kk);
  }
  hasBestEdges_[b] = true;
  bestedge_[b] = -1;
  for (int kk : blossombestedges_[b]) {
    if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
  }
}

void BlossomSolver::expandBlossom(int b, bool endstage) {
  for (int s : childs_[b]) {
    blossomparent_[s] = -1;
    if (s < n_) {
      inblossom_[s] = s;
    } else if (endstage && dualvar_[s] == 0.0) {
      expandBlossom(s, endstage);
    } else {
      forEachLeaf(s, [&](int v) { inblossom_[v] = s; });
    }
  }
  if (!endstage && label_[b] == 2) {
    const std::vector<int>& ch = childs_[b];
    const std::vector<int>& ep = endps_[b];
    const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
    int j = static_cast<int>(std::find(ch.begin(), ch.end(), entrychild) - ch.begin());
    int jstep;
    int endptrick;
    if (j & 1) {
      j -= static_cast<int>(ch.size());
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    int p = labelend_[b];
    while (j != 0) {
      label_[endpoint_[p ^ 1]] = 0;
      label_[endpoint_[wrap(ep, j - endptrick) ^ endptrick ^ 1]] = 0;
      assignLabel(endpoint_[p ^ 1], 2, p);
      allowedge_[wrap(ep, j - endptrick) / 2] = true;
      j += jstep;
      p = wrap(ep, j - endptrick) ^ endptrick;
      allowedge_[p / 2] = true;
      j += jstep;
    }
    int bv = wrap(ch, j);
    label_[endpoint_[p ^ 1]] = label_[bv] = 2;
    labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
    bestedge_[bv] = -1;
    j += jstep;
    while (wrap(ch, j) != entrychild) {
      bv = wrap(ch, j);
      if (label_[bv] == 1) {
        j += jstep;
        continue;
      }
      int found = -1;
      for (int v : leaves(bv)) {
        if (label_[v] != 0) {
          found = v;
          break;
        }
      }
      if (found != -1) {
        label_[found] = 0;
        label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
        assignLabel(found, 2, labelend_[found]);
      }
      j += jstep;
    }
  }
  label_[b] = labelend_[b] = -1;
  childs_[b].clear();
  endps_[b].clear();
  blossombase_[b] = -1;
  blossombestedges_[b].clear();
  hasBestEdges_[b] = false;
  bestedge_[b] = -1;
  unusedblossoms_.push_back(b);
}

void BlossomSolver::augmentBlossom(int b, int v) {
  int t = v;
  while (blossomparent_[t] != b) t = blossomparent_[t];
  if (t >= n_) augmentBlossom(t, v);
  std::vector<int>& ch = childs_[b];
  std::vector<int>& ep = endps_[b];
  const int i = static_cast<int>(std::find(ch.begin(), ch.end(), t) - ch.begin());
  int j = i;
  int jstep;
  int endptrick;
  if (i & 1) {
    j -= static_cast<int>(ch.size());
    jstep = 1;
    endptrick = 0;
  } else {
    jstep = -1;
    endptrick = 1;
  }
  while (j != 0) {
    j += jstep;
    t = wrap(ch, j);
    const int p = wrap(ep, j - endptrick) ^ endptrick;
    if (t >= n_) augmentBlossom(t, endpoint_[p]);
    j += jstep;
    t = wrap(ch, j);
    if (t >= n_) augmentBlossom(t, endpoint_[p ^ 1]);
    mate_[endpoint_[p]] = p ^ 1;
    mate_[endpoint_[p ^ 1]] = p;
  }
  std::rotate(ch.begin(), ch.begin() + i, ch.end());
  std::rotate(ep.begin(), ep.begin() + i, ep.end());
  blossombase_[b] = blossombase_[ch[0]];
}

void BlossomSolver::augmentMatching(int k) {
  const int v = edges_[k].u;
  const int w = edges_[k].v;
  const std::pair<int, int> sides[2] = {{v, 2 * k + 1}, {w, 2 * k}};
  for (auto [s, p] : sides) {
    while (true) {
      const int bs = inblossom_[s];
      if (bs >= n_) augmentBlossom(bs, s);
      mate_[s] = p;
      if (labelend_[bs] == -1) break;
      const int t = endpoint_[labelend_[bs]];
      const int bt = inblossom_[t];
      s = endpoint_[labelend_[bt]];
      const int j = endpoint_[labelend_[bt] ^ 1];
      if (bt >= n_) augmentBlossom(bt, j);
      mate_[j] = labelend_[bt];
      p = labelend_[bt] ^ 1;
    }
  }
}

std::vector<int> BlossomSolver::solve() {
  const int nedge = static_cast<int>(edges_.size());
  if (nedge == 0) return std::vector<int>(static_cast<std::size_t>(n_), -1);

  double maxweight = 0.0;
  for (const WeightedEdge& e : edges_) maxweight = std::max(maxweight, e.weight);

  const auto n2 = static_cast<std::size_t>(2 * n_);
  endpoint_.resize(static_cast<std::size_t>(2 * nedge));
  neighbend_.assign(static_cast<std::size_t>(n_), {});
  for (int k = 0; k < nedge; ++k) {
    endpoint_[2 * k] = edges_[k].u;
    endpoint_[2 * k + 1] = edges_[k].v;
    neighbend_[edges_[k].u].push_back(2 * k + 1);
    neighbend_[edges_[k].v].push_back(2 * k);
  }
  mate_.assign(static_cast<std::size_t>(n_), -1);
  label_.assign(n2, 0);
  labelend_.assign(n2, -1);
  inblossom_.resize(static_cast<std::size_t>(n_));
  for (int v = 0; v < n_; ++v) inblossom_[v] = v;
  blossomparent_.assign(n2, -1);
  childs_.assign(n2, {});
  blossombase_.assign(n2, -1);
  for (int v = 0; v < n_; ++v) blossombase_[v] = v;
  endps_.assign(n2, {});
  bestedge_.assign(n2, -1);
  blossombestedges_.assign(n2, {});
  hasBestEdges_.assign(n2, false);
  unusedblossoms_.clear();
  for (int b = 2 * n_ - 1; b >= n_; --b) unusedblossoms_.push_back(b);
  dualvar_.assign(n2, 0.0);
  for (int v = 0; v < n_; ++v) dualvar_[v] = maxweight;
  allowedge_.assign(static_cast<std::size_t>(nedge), false);

  for (int stage = 0; stage < n_; ++stage) {
    std::fill(label_.begin(), label_.end(), 0);
    std::fill(bestedge_.begin(), bestedge_.end(), -1);
    for (int b = n_; b < 2 * n_; ++b) {
      blossombestedges_[b].clear();
      hasBestEdges_[b] = false;
    }
    std::fill(allowedge_.begin(), allowedge_.end(), false);
    queue_.clear();

    for (int v = 0; v < n_; ++v) {
      if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assignLabel(v, 1, -1);
    }

    bool augmented = false;
    while (true) {
      while (!queue_.empty() && !augmented) {
        const int v = queue_.back();
        queue_.pop_back();
        for (int p : neighbend_[v]) {
          const int k = p / 2;
          const int w = endpoint_[p];
          if (inblossom_[v] == inblossom_[w]) continue;
          double kslack = 0.0;
          if (!allowedge_[k]) {
            kslack = slack(k);
            if (kslack <= 0.0) allowedge_[k] = true;
          }
          if (allowedge_[k]) {
            if (label_[inblossom_[w]] == 0) {
              assignLabel(w, 2, p ^ 1);
            } else if (label_[inblossom_[w]] == 1) {
              const int base = scanBlossom(v, w);
              if (base >= 0) {
                addBlossom(base, k);
              } else {
                augmentMatching(k);
                augmented = true;
                break;
              }
            } else if (label_[w] == 0) {
              label_[w] = 2;
              labelend_[w] = p ^ 1;
            }
          } else if (label_[inblossom_[w]] == 1) {
            const int b = inblossom_[v];
            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
          } else if (label_[w] == 0) {
            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
          }
        }
      }
      if (augmented) break;

      int deltatype = -1;
      double delta = 0.0;
      int deltaedge = -1;
      int deltablossom = -1;

      for (int v = 0; v < n_; ++v) {
        if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
          const double d = slack(bestedge_[v]);
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 2;
            deltaedge = bestedge_[v];
          }
        }
      }
      for (int b = 0; b < 2 * n_; ++b) {
        if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
          const double d = slack(bestedge_[b]) / 2.0;
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 3;
            deltaedge = bestedge_[b];
          }
        }
      }
      for (int b = n_; b < 2 * n_; ++b) {
        if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
            (deltatype == -1 || dualvar_[b] < delta)) {
          delta = dualvar_[b];
          deltatype = 4;
          deltablossom = b;
        }
      }
      if (deltatype == -1) {
        // No further progress possible: max-cardinality mode terminates here.
        deltatype = 1;
        double minDual = dualvar_[0];
        for (int v = 1; v < n_; ++v) minDual = std::min(minDual, dualvar_[v]);
        delta = std::max(0.0, minDual);
      }

      for (int v = 0; v < n_; ++v) {
        const int l = label_[inblossom_[v]];
        if (l == 1) {
          dualvar_[v] -= delta;
        } else if (l == 2) {
          dualvar_[v] += delta;
        }
      }
      for (int b = n_; b < 2 * n_; ++b) {
        if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
          if (label_[b] == 1) {
            dualvar_[b] += delta;
          } else if (label_[b] == 2) {
            dualvar_[b] -= delta;
          }
        }
      }

      if (deltatype == 1) {
        break;
      } else if (deltatype == 2) {
        allowedge_[deltaedge] = true;
        int i = edges_[deltaedge].u;
        int j = edges_[deltaedge].v;
        if (label_[inblossom_[i]] == 0) std::swap(i, j);
        queue_.push_back(i);
      } else if (deltatype == 3) {
        allowedge_[deltaedge] = true;
        queue_.push_back(edges_[deltaedge].u);
      } else {
        expandBlossom(deltablossom, false);
      }
    }

    if (!augmented) break;

    for (int b = n_; b < 2 * n_; ++b) {
      if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
          dualvar_[b] == 0.0) {
        expandBlossom(b, true);
      }
    }
  }

  std::vector<int> result(static_cast<std::size_t>(n_), -1);
  for (int v = 0; v < n_; ++v) {
    if (mate_[v] >= 0) result[v] = endpoint_[mate_[v]];
  }
  return result;
}

double BlossomSolver::reducedCost(int u, int v, double weight) const {
  double s = dualvar_[u] + dualvar_[v] - 2.0 * weight;
  std::vector<int> ancestorsU;
  for (int b = blossomparent_[u]; b != -1; b = blossomparent_[b]) ancestorsU.push_back(b);
  for (int b = blossomparent_[v]; b != -1; b = blossomparent_[b]) {
    if (std::find(ancestorsU.begin(), ancestorsU.end(), b) != ancestorsU.end())
      s += 2.0 * dualvar_[b];
  }
  return s;
}

PerfectMatching assemble(const WeightedGraph& graph, const std::vector<int>& mate) {
  std::vector<std::vector<std::pair<int, std::size_t>>> adj(
      static_cast<std::size_t>(graph.vertexCount));
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const WeightedEdge& e = graph.edges[k];
    adj[e.u].emplace_back(e.v, k);
    adj[e.v].emplace_back(e.u, k);
  }
  PerfectMatching m;
  for (int v = 0; v < graph.vertexCount; ++v) {
    const int w = mate[v];
    if (w < 0) fail(ErrorCode::NoPerfectMatching, "vertex " + std::to_string(v) + " unmatched");
    if (mate[w] != v) fail(ErrorCode::InvariantViolation, "inconsistent mate array");
    if (v > w) continue;
    std::size_t edge = graph.edges.size();
    for (auto [to, k] : adj[v]) {
      if (to == w) edge = k;
    }
    if (edge == graph.edges.size()) fail(ErrorCode::InvariantViolation, "matched non-edge");
    m.pairs.emplace_back(v, w);
    m.edgeIndices.push_back(edge);
  }
  // Summed in pair order so that equal matchings give bit-identical totals.
  for (std::size_t k : m.edgeIndices) m.totalWeight += graph.edges[k].weight;
  return m;
}

}  // namespace

namespace {

std::vector<WeightedEdge> shiftedPositive(const std::vector<WeightedEdge>& edges) {
  // All perfect matchings have n/2 edges, so a uniform shift preserves the
  // optimum among them and the max-cardinality search finds a perfect one
  // whenever it exists.
  double minWeight = 0.0;
  for (const WeightedEdge& e : edges) minWeight = std::min(minWeight, e.weight);
  std::vector<WeightedEdge> shifted = edges;
  for (WeightedEdge& e : shifted) {
    e.weight -= minWeight;
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  return shifted;
}

// Optimum on the subgraph induced by the vertices with alive[v]; returns the
// mate array in original numbering, or nothing if that subgraph has no
// perfect matching.
std::optional<std::vector<int>> solveInduced(const WeightedGraph& graph,
                                             const std::vector<bool>& alive) {
  std::vector<int> local(static_cast<std::size_t>(graph.vertexCount), -1);
  std::vector<int> global;
  for (int v = 0; v < graph.vertexCount; ++v) {
    if (alive[v]) {
      local[v] = static_cast<int>(global.size());
      global.push_back(v);
    }
  }
  std::vector<WeightedEdge> edges;
  for (const WeightedEdge& e : graph.edges) {
    if (alive[e.u] && alive[e.v]) edges.push_back({local[e.u], local[e.v], e.weight});
  }
  const int n = static_cast<int>(global.size());
  BlossomSolver solver(n, shiftedPositive(edges));
  const std::vector<int> mate = solver.solve();
  std::vector<int> out(static_cast<std::size_t>(graph.vertexCount), -1);
  for (int v = 0; v < n; ++v) {
    if (mate[v] < 0) return std::nullopt;
    out[global[v]] = global[mate[v]];
  }
  return out;
}

}  // namespace

PerfectMatching maxWeightPerfectMatching(const WeightedGraph& graph) {
  graph.validate();
  if (graph.vertexCount % 2 != 0)
    fail(ErrorCode::InvalidGraph, "perfect matching needs an even vertex count");
  if (graph.vertexCount == 0) return {};

  const int n = graph.vertexCount;
  const std::vector<WeightedEdge> shifted = shiftedPositive(graph.edges);
  BlossomSolver solver(n, shifted);
  std::vector<int> mate = solver.solve();
  for (int v = 0; v < n; ++v) {
    if (mate[v] < 0) fail(ErrorCode::NoPerfectMatching, "vertex " + std::to_string(v) + " unmatched");
  }

  // Canonical optimum: the lexicographically smallest pair list among all
  // optimal matchings. The final duals are optimal for the perfect matching
  // LP, so an edge lies in some optimal matching only if its reduced cost is
  // zero; only those edges need a forced re-solve.
  double scale = 1.0;
  for (const WeightedEdge& e : graph.edges) scale = std::max(scale, std::abs(e.weight));
  const double tol = 1e-9 * scale * n;

  std::vector<std::vector<std::pair<int, std::size_t>>> adj(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const WeightedEdge& e = graph.edges[k];
    if (solver.reducedCost(shifted[k].u, shifted[k].v, shifted[k].weight) > tol) continue;
    adj[e.u].emplace_back(e.v, k);
    adj[e.v].emplace_back(e.u, k);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());

  auto edgeWeight = [&](int a, int b) {
    for (auto [to, k] : adj[a]) {
      if (to == b) return graph.edges[k].weight;
    }
    for (const WeightedEdge& e : graph.edges) {
      if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) return e.weight;
    }
    fail(ErrorCode::InvariantViolation, "matched non-edge");
  };
  auto remainingWeight = [&](const std::vector<int>& m, const std::vector<bool>& alive) {
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
      if (alive[v] && v < m[v]) total += edgeWeight(v, m[v]);
    }
    return total;
  };

  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  for (int u = 0; u < n; ++u) {
    if (!alive[u]) continue;
    for (auto [j, k] : adj[u]) {
      if (j >= mate[u]) break;
      if (!alive[j]) continue;
      std::vector<bool> rest = alive;
      rest[u] = rest[j] = false;
      const auto sub = solveInduced(graph, rest);
      if (!sub) continue;
      const double current = remainingWeight(mate, alive);
      const double candidate = graph.edges[k].weight + remainingWeight(*sub, rest);
      if (candidate >= current - tol) {
        for (int v = 0; v < n; ++v) {
          if (rest[v]) mate[v] = (*sub)[v];
        }
        mate[u] = j;
        mate[j] = u;
        break;
      }
    }
    alive[u] = alive[mate[u]] = false;
  }
  return assemble(graph, mate);
}

namespace {

void enumerate(const WeightedGraph& graph,
               const std::vector<std::vector<std::pair<int, std::size_t>>>& adj,
               std::vector<bool>& used, std::vector<std::size_t>& chosen,
               const std::function<void(const PerfectMatching&)>& visit) {
  int first = -1;
  for (int v = 0; v < graph.vertexCount; ++v) {
    if (!used[v]) {
      first = v;
      break;
    }
  }
  if (first == -1) {
    PerfectMatching m;
    for (std::size_t k : chosen) {
      const WeightedEdge& e = graph.edges[k];
      m.pairs.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
      m.edgeIndices.push_back(k);
    }
    // chosen is built lowest-uncovered-vertex first, hence already sorted
    for (std::size_t k : m.edgeIndices) m.totalWeight += graph.edges[k].weight;
    visit(m);
    return;
  }
  used[first] = true;
  for (auto [w, k] : adj[first]) {
    if (used[w]) continue;
    used[w] = true;
    chosen.push_back(k);
    enumerate(graph, adj, used, chosen, visit);
    chosen.pop_back();
    used[w] = false;
  }
  used[first] = false;
}

}  // namespace

void enumeratePerfectMatchings(const WeightedGraph& graph,
                               const std::function<void(const PerfectMatching&)>& visit) {
  graph.validate();
  if (graph.vertexCount > kEnumerationLimit)
    fail(ErrorCode::TooLarge, "enumeration limited to " + std::to_string(kEnumerationLimit) +
                                  " vertices");
  if (graph.vertexCount % 2 != 0) return;
  std::vector<std::vector<std::pair<int, std::size_t>>> adj(
      static_cast<std::size_t>(graph.vertexCount));
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const WeightedEdge& e = graph.edges[k];
    adj[e.u].emplace_back(e.v, k);
    adj[e.v].emplace_back(e.u, k);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  std::vector<bool> used(static_cast<std::size_t>(graph.vertexCount), false);
  std::vector<std::size_t> chosen;
  enumerate(graph, adj, used, chosen, visit);
}

PerfectMatching oracleMaxMatching(const WeightedGraph& graph) {
  if (graph.vertexCount % 2 != 0)
    fail(ErrorCode::InvalidGraph, "perfect matching needs an even vertex count");
  std::optional<PerfectMatching> best;
  enumeratePerfectMatchings(graph, [&](const PerfectMatching& m) {
    if (!best || m.totalWeight > best->totalWeight ||
        (m.totalWeight == best->totalWeight && m.pairs < best->pairs)) {
      best = m;
    }
  });
  if (!best) {
    if (graph.vertexCount == 0) return {};
    fail(ErrorCode::NoPerfectMatching, "graph admits no perfect matching");
  }
  return *best;
}

}  // namespace swiss
