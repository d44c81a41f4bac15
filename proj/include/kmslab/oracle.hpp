#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "kmslab/core.hpp"
#include "kmslab/cover.hpp"
#include "kmslab/mean_cycle.hpp"
#include "kmslab/presentation.hpp"

// Deliberately naive reference implementations, kept free of the traversal
// machinery of the main modules: membership is forward simulation, covers
// come from enumerated points, spectral brackets from literal word sums.
// They exist to falsify the fast paths at desk scale, never to be fast.

namespace kmslab::oracle {

struct OracleBudget {
  std::size_t max_word_len = 14;
  std::size_t max_graph = 4096;
  std::size_t max_count = 6000000;
};

// Is x readable starting from vertex q? Forward simulation: consume the
// head, then look for an infinite run of the cycle word in the product of
// the graph with the cycle positions.
inline bool brute_readable(const Presentation& g, const EpPoint& x,
                           uint32_t q) {
  const auto& edges = g.edges();
  std::vector<uint32_t> cur{q};
  for (Symbol a : x.head()) {
    std::vector<uint32_t> next;
    for (uint32_t v : cur)
      for (const Edge& e : edges)
        if (e.src == v && e.label == a) next.push_back(e.dst);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.empty()) return false;
    cur = std::move(next);
  }
  // product nodes (vertex, position in cycle)
  const std::size_t m = x.cycle_size();
  const std::size_t nodes = g.vertex_count() * m;
  std::vector<std::vector<uint32_t>> adj(nodes);
  for (std::size_t i = 0; i < m; ++i)
    for (const Edge& e : edges)
      if (e.label == x.cycle()[i])
        adj[e.src * m + i].push_back(
            static_cast<uint32_t>(e.dst * m + (i + 1) % m));
  std::vector<bool> reach(nodes, false);
  std::vector<uint32_t> stack;
  for (uint32_t v : cur) {
    if (!reach[v * m]) {
      reach[v * m] = true;
      stack.push_back(static_cast<uint32_t>(v * m));
    }
  }
  while (!stack.empty()) {
    uint32_t u = stack.back();
    stack.pop_back();
    for (uint32_t w : adj[u])
      if (!reach[w]) {
        reach[w] = true;
        stack.push_back(w);
      }
  }
  // peel nodes with no successor inside the reachable part; a nonempty
  // remainder carries an infinite run
  std::vector<bool> alive = reach;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t u = 0; u < nodes; ++u) {
      if (!alive[u]) continue;
      bool has = false;
      for (uint32_t w : adj[u])
        if (alive[w]) has = true;
      if (!has) {
        alive[u] = false;
        changed = true;
      }
    }
  }
  for (std::size_t u = 0; u < nodes; ++u)
    if (alive[u]) return true;
  return false;
}

inline VertexSet brute_readable_set(const Presentation& g, const EpPoint& x) {
  VertexSet r;
  for (uint32_t q = 0; q < g.vertex_count(); ++q)
    if (brute_readable(g, x, q)) r.set(q);
  return r;
}

inline bool brute_member(const Presentation& g, const EpPoint& x) {
  for (uint32_t q = 0; q < g.vertex_count(); ++q)
    if (brute_readable(g, x, q)) return true;
  return false;
}

struct PreimageCount {
  std::size_t count = 0;
  std::vector<std::vector<Symbol>> words;
};

// Literal enumeration of the words w with |w| = n and w x in the shift.
// Prefixes that cannot be read anywhere are pruned; a word is accepted when
// some path reading it ends where x is readable.
inline PreimageCount brute_preimages(const Presentation& g, const EpPoint& x,
                                     int n, const OracleBudget& budget = {}) {
  if (n < 0 || static_cast<std::size_t>(n) > budget.max_word_len)
    throw BudgetExceeded("brute_preimages: word length over budget");
  VertexSet target;
  for (uint32_t q = 0; q < g.vertex_count(); ++q)
    if (brute_readable(g, x, q)) target.set(q);

  PreimageCount out;
  std::size_t visited = 0;
  // ends[v] = true if some path labeled by the current prefix ends at v
  std::vector<Symbol> word;
  auto step = [&](const VertexSet& ends, Symbol a) {
    VertexSet next;
    for (const Edge& e : g.edges())
      if (e.label == a && ends.test(e.src)) next.set(e.dst);
    return next;
  };
  auto rec = [&](auto&& self, const VertexSet& ends, int left) -> void {
    if (++visited > budget.max_count)
      throw BudgetExceeded("brute_preimages: enumeration over budget");
    if (left == 0) {
      if (!(ends & target).empty()) {
        ++out.count;
        out.words.push_back(word);
      }
      return;
    }
    for (Symbol a = 0; a < g.symbol_count(); ++a) {
      VertexSet next = step(ends, a);
      if (next.empty()) continue;
      word.push_back(a);
      self(self, next, left - 1);
      word.pop_back();
    }
  };
  rec(rec, g.full_set(), n);
  return out;
}

// Cover built the slow way: readable sets of every eventually periodic
// point within the word budget, closed under nonempty pre maps (by direct
// edge scan), trimmed, and compared by subset identity.
inline CoverGraph brute_cover(const Presentation& g,
                              const OracleBudget& budget = {}) {
  std::size_t len = std::min<std::size_t>(budget.max_word_len, 8);
  std::map<VertexSet, EpPoint> found;

  std::vector<std::vector<Symbol>> words{{}};
  for (std::size_t l = 1; l <= len; ++l) {
    std::vector<std::vector<Symbol>> next;
    for (const auto& w : words)
      for (Symbol a = 0; a < g.symbol_count(); ++a) {
        auto w2 = w;
        w2.push_back(a);
        next.push_back(std::move(w2));
      }
    words = std::move(next);
    // all (head, cycle) splits of each word of this length
    for (const auto& w : words) {
      for (std::size_t split = 0; split < w.size(); ++split) {
        EpPoint x(std::vector<Symbol>(w.begin(), w.begin() + split),
                  std::vector<Symbol>(w.begin() + split, w.end()));
        VertexSet r = brute_readable_set(g, x);
        if (!r.empty()) found.emplace(r, x);
        if (found.size() > budget.max_graph)
          throw BudgetExceeded("brute_cover: subset family over budget");
      }
    }
  }

  auto pre_scan = [&g](Symbol a, const VertexSet& t) {
    VertexSet s;
    for (const Edge& e : g.edges())
      if (e.label == a && t.test(e.dst)) s.set(e.src);
    return s;
  };

  std::vector<std::pair<VertexSet, EpPoint>> queue(found.begin(), found.end());
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (Symbol a = 0; a < g.symbol_count(); ++a) {
      VertexSet s = pre_scan(a, queue[i].first);
      if (s.empty()) continue;
      EpPoint ax = queue[i].second.prepended(a);
      if (found.emplace(s, ax).second) queue.push_back({s, ax});
      if (found.size() > budget.max_graph)
        throw BudgetExceeded("brute_cover: subset family over budget");
    }
  }

  // hedges by definition, then trim vertices with no out-edge
  std::vector<VertexSet> family;
  for (const auto& [s, x] : found) family.push_back(s);
  std::map<VertexSet, std::size_t> id;
  for (std::size_t i = 0; i < family.size(); ++i) id[family[i]] = i;
  struct E {
    std::size_t src, dst;
    Symbol a;
  };
  std::vector<E> hedges;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (Symbol a = 0; a < g.symbol_count(); ++a) {
      VertexSet s = pre_scan(a, family[i]);
      if (!s.empty()) hedges.push_back(E{id[s], i, a});
    }
  std::vector<bool> alive(family.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::size_t> outd(family.size(), 0);
    for (const E& e : hedges)
      if (alive[e.src] && alive[e.dst]) ++outd[e.src];
    for (std::size_t i = 0; i < family.size(); ++i)
      if (alive[i] && outd[i] == 0) {
        alive[i] = false;
        changed = true;
      }
  }

  std::vector<VertexSet> kept;
  for (std::size_t i = 0; i < family.size(); ++i)
    if (alive[i]) kept.push_back(family[i]);
  std::sort(kept.begin(), kept.end(), VertexSet::size_lex_less);
  std::map<VertexSet, uint32_t> nid;
  for (uint32_t i = 0; i < kept.size(); ++i) nid[kept[i]] = i;
  std::vector<HEdge> out_edges;
  for (const E& e : hedges)
    if (alive[e.src] && alive[e.dst])
      out_edges.push_back(
          HEdge{nid[family[e.src]], e.a, nid[family[e.dst]]});
  std::sort(out_edges.begin(), out_edges.end());
  std::vector<bool> canonical(kept.size(), false);
  std::vector<std::optional<EpPoint>> witness(kept.size());
  for (uint32_t i = 0; i < kept.size(); ++i) {
    auto it = found.find(kept[i]);
    if (it != found.end()) {
      canonical[i] = true;
      witness[i] = it->second;
    }
  }
  return CoverGraph(g, std::move(kept), std::move(out_edges),
                    std::move(canonical), std::move(witness));
}

struct RhoBracket {
  double lower = 0.0;
  double upper = 0.0;
  int horizon = 0;
};

// Weighted word sums over the base presentation: W_n(T) sums, over the
// length-n words readable into T, the product of per-symbol weights.
// Submultiplicativity of the max over the full set and supermultiplicativity
// of the min over singletons bracket the transfer spectral radius.
inline RhoBracket brute_rho(const Presentation& g,
                            const std::vector<double>& symbol_weight, int n,
                            const OracleBudget& budget = {}) {
  if (n < 1 || static_cast<std::size_t>(n) > budget.max_word_len)
    throw BudgetExceeded("brute_rho: horizon over budget");
  std::size_t visited = 0;
  auto pre_scan = [&](Symbol a, const VertexSet& t) {
    VertexSet s;
    for (const Edge& e : g.edges())
      if (e.label == a && t.test(e.dst)) s.set(e.src);
    return s;
  };
  // sum over words w with pre_w(T) nonempty of prod weights; DFS prepending
  auto word_sum = [&](VertexSet t0) {
    double total = 0.0;
    auto rec = [&](auto&& self, const VertexSet& t, double prod, int left) -> void {
      if (++visited > budget.max_count)
        throw BudgetExceeded("brute_rho: enumeration over budget");
      if (left == 0) {
        total += prod;
        return;
      }
      for (Symbol a = 0; a < g.symbol_count(); ++a) {
        VertexSet s = pre_scan(a, t);
        if (s.empty()) continue;
        self(self, s, prod * symbol_weight[a], left - 1);
      }
    };
    rec(rec, t0, 1.0, n);
    return total;
  };
  RhoBracket out;
  out.horizon = n;
  double mn = std::numeric_limits<double>::infinity();
  for (uint32_t v = 0; v < g.vertex_count(); ++v) {
    VertexSet t;
    t.set(v);
    mn = std::min(mn, word_sum(t));
  }
  double mx = word_sum(g.full_set());
  out.lower = std::pow(mn, 1.0 / n);
  out.upper = std::pow(mx, 1.0 / n);
  return out;
}

// The same bracket for a backward-deterministic labeled graph (a cover):
// word sums per vertex are path sums, weights may live on edges.
inline RhoBracket brute_rho_cover(const CoverGraph& h,
                                  const std::vector<double>& hedge_weight,
                                  int n, const OracleBudget& budget = {}) {
  if (n < 1 || static_cast<std::size_t>(n) > budget.max_word_len)
    throw BudgetExceeded("brute_rho: horizon over budget");
  std::size_t visited = 0;
  auto word_sum = [&](uint32_t v0) {
    double total = 0.0;
    auto rec = [&](auto&& self, uint32_t v, double prod, int left) -> void {
      if (++visited > budget.max_count)
        throw BudgetExceeded("brute_rho: enumeration over budget");
      if (left == 0) {
        total += prod;
        return;
      }
      for (std::size_t e = 0; e < h.hedges().size(); ++e)
        if (h.hedges()[e].dst == v)
          self(self, h.hedges()[e].src, prod * hedge_weight[e], left - 1);
    };
    rec(rec, v0, 1.0, n);
    return total;
  };
  RhoBracket out;
  out.horizon = n;
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (uint32_t v = 0; v < h.size(); ++v) {
    double s = word_sum(v);
    mn = std::min(mn, s);
    mx = std::max(mx, s);
  }
  out.lower = std::pow(mn, 1.0 / n);
  out.upper = std::pow(mx, 1.0 / n);
  return out;
}

struct SimpleCycle {
  std::vector<int> edges;
  double mean = 0.0;
};

struct CycleSurvey {
  std::vector<SimpleCycle> cycles;
  double min_mean = 0.0;
  double max_mean = 0.0;
};

// Every simple cycle, by DFS anchored at its smallest vertex.
inline CycleSurvey brute_cycles(const WeightedGraph& g,
                                const OracleBudget& budget = {}) {
  CycleSurvey out;
  std::vector<bool> on_path(g.n, false);
  std::vector<int> path_edges;
  for (int s = 0; s < g.n; ++s) {
    auto rec = [&](auto&& self, int v) -> void {
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (g.edges[e].src != v) continue;
        int w = g.edges[e].dst;
        if (w == s) {
          SimpleCycle c;
          c.edges = path_edges;
          c.edges.push_back(static_cast<int>(e));
          double sum = 0.0;
          for (int ce : c.edges) sum += g.edges[ce].w;
          c.mean = sum / static_cast<double>(c.edges.size());
          out.cycles.push_back(std::move(c));
          if (out.cycles.size() > budget.max_count)
            throw BudgetExceeded("brute_cycles: too many cycles");
        } else if (w > s && !on_path[w]) {
          on_path[w] = true;
          path_edges.push_back(static_cast<int>(e));
          self(self, w);
          path_edges.pop_back();
          on_path[w] = false;
        }
      }
    };
    rec(rec, s);
  }
  if (out.cycles.empty()) return out;
  out.min_mean = std::numeric_limits<double>::infinity();
  out.max_mean = -out.min_mean;
  for (const SimpleCycle& c : out.cycles) {
    out.min_mean = std::min(out.min_mean, c.mean);
    out.max_mean = std::max(out.max_mean, c.mean);
  }
  return out;
}

}  // namespace kmslab::oracle
