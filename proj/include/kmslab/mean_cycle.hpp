#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "kmslab/core.hpp"
#include "kmslab/spectral.hpp"

namespace kmslab {

struct WeightedEdge {
  int src = 0;
  int dst = 0;
  double w = 0.0;
  int tag = -1;  // caller's edge id, carried into reported cycles
};

struct WeightedGraph {
  int n = 0;
  std::vector<WeightedEdge> edges;
};

struct MeanCycle {
  double value = 0.0;
  std::vector<int> edges;  // indices into the input edge list, in cycle order
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Karp on one strongly connected component. d[k][v] = least weight of a
// k-edge walk from an arbitrary source; the min-mean value is
// min_v max_k (d[n][v]-d[k][v])/(n-k), and the walk attaining d[n][v*]
// contains a cycle of exactly that mean, recovered by decomposition.
inline std::optional<MeanCycle> karp_scc(const WeightedGraph& g,
                                         const std::vector<int>& comp) {
  const int k = static_cast<int>(comp.size());
  std::vector<int> local(g.n, -1);
  for (int i = 0; i < k; ++i) local[comp[i]] = i;
  std::vector<int> eidx;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (local[g.edges[e].src] >= 0 && local[g.edges[e].dst] >= 0)
      eidx.push_back(static_cast<int>(e));
  if (eidx.empty()) return std::nullopt;

  std::vector<std::vector<double>> d(k + 1, std::vector<double>(k, kInf));
  std::vector<std::vector<int>> parent(k + 1, std::vector<int>(k, -1));
  d[0][0] = 0.0;  // source = comp[0]
  for (int step = 1; step <= k; ++step) {
    for (int e : eidx) {
      int a = local[g.edges[e].src], b = local[g.edges[e].dst];
      double cand = d[step - 1][a] + g.edges[e].w;
      if (cand < d[step][b]) {
        d[step][b] = cand;
        parent[step][b] = e;
      }
    }
  }
  double best = kInf;
  int best_v = -1;
  for (int v = 0; v < k; ++v) {
    if (d[k][v] == kInf) continue;
    double worst = -kInf;
    for (int j = 0; j < k; ++j) {
      if (d[j][v] == kInf) continue;
      worst = std::max(worst, (d[k][v] - d[j][v]) / (k - j));
    }
    if (worst < best) {
      best = worst;
      best_v = v;
    }
  }
  if (best_v < 0) return std::nullopt;

  // walk back the k-edge walk to best_v and cut out its simple cycles
  std::vector<int> walk(k);  // edge ids, walk[step-1] used at step
  int v = best_v;
  for (int step = k; step >= 1; --step) {
    int e = parent[step][v];
    walk[step - 1] = e;
    v = local[g.edges[e].src];
  }
  std::vector<int> pos(k, -1);  // vertex -> index into current path
  std::vector<int> path_v{v};
  std::vector<int> path_e;
  pos[v] = 0;
  std::optional<MeanCycle> found;
  for (int e : walk) {
    int b = local[g.edges[e].dst];
    path_e.push_back(e);
    if (pos[b] >= 0) {
      // simple cycle from pos[b] to end
      std::vector<int> cyc(path_e.begin() + pos[b], path_e.end());
      double sum = 0.0;
      for (int ce : cyc) sum += g.edges[ce].w;
      double mean = sum / static_cast<double>(cyc.size());
      if (!found || mean < found->value - 1e-15)
        found = MeanCycle{mean, cyc};
      // contract the cycle and continue scanning from b
      path_e.pop_back();  // the closing edge
      while (static_cast<int>(path_v.size()) > pos[b] + 1) {
        pos[path_v.back()] = -1;
        path_v.pop_back();
        path_e.pop_back();
      }
    } else {
      path_v.push_back(b);
      pos[b] = static_cast<int>(path_v.size()) - 1;
    }
  }
  if (!found) throw Error("mean_cycle: walk decomposition found no cycle");
  if (std::abs(found->value - best) > 1e-9 * std::max(1.0, std::abs(best)))
    throw Error("mean_cycle: extracted cycle mean disagrees with Karp value");
  found->value = best;
  return found;
}

}  // namespace detail

// Minimum mean cycle over the whole graph (min over SCCs), with a witness
// cycle. nullopt iff the graph has no cycle.
inline std::optional<MeanCycle> min_mean_cycle(const WeightedGraph& g) {
  LogMatrix adj(g.n);
  for (const auto& e : g.edges) adj.at(e.src, e.dst) = 0.0;
  SccDecomposition scc = scc_decompose(adj);
  std::optional<MeanCycle> best;
  for (const auto& comp : scc.members) {
    if (comp.size() == 1) {
      bool self = false;
      for (const auto& e : g.edges)
        if (e.src == comp[0] && e.dst == comp[0]) self = true;
      if (!self) continue;
    }
    auto c = detail::karp_scc(g, comp);
    if (c && (!best || c->value < best->value)) best = c;
  }
  return best;
}

inline std::optional<MeanCycle> max_mean_cycle(const WeightedGraph& g) {
  WeightedGraph neg = g;
  for (auto& e : neg.edges) e.w = -e.w;
  auto c = min_mean_cycle(neg);
  if (c) c->value = -c->value;
  return c;
}

}  // namespace kmslab
