#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "kmslab/cover.hpp"
#include "kmslab/mean_cycle.hpp"
#include "kmslab/presentation.hpp"
#include "kmslab/spectral.hpp"

namespace kmslab {

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  int horizon = 0;
};

// Preimage-growth invariants of the extension, all in nats. h_m is the
// growth rate of the largest number of n-step preimages; for these systems
// it equals the Perron root of the cover automaton, since n-step preimages
// of a point biject with the length-n words readable into its first
// predecessor set. g_min is the matching rate for the smallest fiber.
struct GrowthRates {
  double h_m = 0.0;
  double g_min = 0.0;
  double g_max = 0.0;
  Bracket h_m_bracket, g_min_bracket, g_max_bracket;
  bool converged = true;
};

// Transfer-oriented count matrix: entry (i, j) = number of labels a with
// pre_a(S_i) = S_j, i.e. in-edges of i with source j.
inline LogMatrix cover_count_matrix(const CoverGraph& h) {
  LogMatrix m(static_cast<int>(h.size()));
  std::vector<std::vector<int>> cnt(h.size(), std::vector<int>(h.size(), 0));
  for (const HEdge& e : h.hedges()) ++cnt[e.dst][e.src];
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j)
      if (cnt[i][j]) m.at(static_cast<int>(i), static_cast<int>(j)) =
          std::log(static_cast<double>(cnt[i][j]));
  return m;
}

inline GrowthRates growth_rates(const CoverGraph& h, int horizon) {
  if (horizon < 2) throw Error("growth_rates: horizon must be >= 2");
  GrowthRates out;
  LogMatrix m = cover_count_matrix(h);
  SpectralSummary s = spectral_summary(m);
  out.converged = s.converged;
  out.h_m = std::log(s.rho);
  out.g_max = out.h_m;

  // exact path counts ending at each hvertex, horizon steps
  std::vector<double> cnt(h.size(), 1.0);
  for (int step = 0; step < horizon; ++step) {
    std::vector<double> next(h.size(), 0.0);
    for (const HEdge& e : h.hedges()) next[e.dst] += cnt[e.src];
    cnt = std::move(next);
  }
  double cmax = *std::max_element(cnt.begin(), cnt.end());
  double cmin = *std::min_element(cnt.begin(), cnt.end());

  // max column sums are submultiplicative: finite horizons overestimate;
  // min column sums are supermultiplicative: finite horizons underestimate
  double fekete_upper = std::log(cmax) / horizon;
  double fekete_lower = std::log(cmin) / horizon;

  out.h_m_bracket = Bracket{std::log(std::max(s.lower, 1e-300)),
                            std::min(std::log(s.upper), fekete_upper), horizon};
  out.g_max_bracket = out.h_m_bracket;

  // g_min: smallest growth over hvertices; the count at T grows like the
  // largest Perron root among classes with a path into T
  const int nc = s.scc.count;
  std::vector<double> best_rho(nc), best_lo(nc), best_hi(nc);
  // flow edge i -> j in m means H-edge j -> i, so H-reachability into a
  // vertex is flow-reachability out of it; ids are flow-topological
  for (int c = nc - 1; c >= 0; --c) {
    best_rho[c] = s.per_class[c].rho;
    best_lo[c] = s.per_class[c].lower;
    best_hi[c] = s.per_class[c].upper;
    for (int v : s.scc.members[c]) {
      for (int j = 0; j < m.n; ++j) {
        if (!m.nonzero(v, j)) continue;
        int cj = s.scc.comp[j];
        if (cj == c) continue;
        best_rho[c] = std::max(best_rho[c], best_rho[cj]);
        best_lo[c] = std::max(best_lo[c], best_lo[cj]);
        best_hi[c] = std::max(best_hi[c], best_hi[cj]);
      }
    }
  }
  double gmin_rho = std::numeric_limits<double>::infinity();
  double gmin_lo = gmin_rho, gmin_hi = gmin_rho;
  for (uint32_t v = 0; v < h.size(); ++v) {
    int c = s.scc.comp[v];
    gmin_rho = std::min(gmin_rho, best_rho[c]);
    gmin_lo = std::min(gmin_lo, best_lo[c]);
    gmin_hi = std::min(gmin_hi, best_hi[c]);
  }
  out.g_min = std::log(gmin_rho);
  out.g_min_bracket =
      Bracket{std::max(fekete_lower, std::log(std::max(gmin_lo, 1e-300))),
              std::log(gmin_hi), horizon};
  return out;
}

// ---- extremal time averages -------------------------------------------------

struct MeanCycleResult {
  double value = 0.0;
  bool is_min = true;
  std::vector<int> edge_indices;  // into g.edges() / h.hedges()
};

struct ExtremalAverages {
  MeanCycleResult a;  // infimum of time averages
  MeanCycleResult b;  // supremum
};

namespace detail {

inline ExtremalAverages extremal_of(const WeightedGraph& wg) {
  auto lo = min_mean_cycle(wg);
  auto hi = max_mean_cycle(wg);
  if (!lo || !hi) throw Error("extremal_birkhoff: graph has no cycle");
  ExtremalAverages out;
  out.a.value = lo->value;
  out.a.is_min = true;
  for (int e : lo->edges) out.a.edge_indices.push_back(wg.edges[e].tag);
  out.b.value = hi->value;
  out.b.is_min = false;
  for (int e : hi->edges) out.b.edge_indices.push_back(wg.edges[e].tag);
  return out;
}

}  // namespace detail

// Depth-1 label potential: averages over the presentation graph. Every
// finite path of an essential presentation extends to a point, so cycle
// means exhaust the closure of time averages.
inline ExtremalAverages extremal_birkhoff(const Presentation& g,
                                          const std::vector<double>& f_sym) {
  require_essential(g, "extremal_birkhoff");
  WeightedGraph wg;
  wg.n = static_cast<int>(g.vertex_count());
  for (std::size_t e = 0; e < g.edges().size(); ++e)
    wg.edges.push_back(WeightedEdge{static_cast<int>(g.edges()[e].src),
                                    static_cast<int>(g.edges()[e].dst),
                                    f_sym[g.edges()[e].label],
                                    static_cast<int>(e)});
  return detail::extremal_of(wg);
}

// Cover-vertex potential: averages over H-paths, the potential is read at
// the source vertex of each step.
inline ExtremalAverages extremal_birkhoff(const CoverGraph& h,
                                          const std::vector<double>& f_hv) {
  WeightedGraph wg;
  wg.n = static_cast<int>(h.size());
  for (std::size_t e = 0; e < h.hedges().size(); ++e)
    wg.edges.push_back(WeightedEdge{static_cast<int>(h.hedges()[e].src),
                                    static_cast<int>(h.hedges()[e].dst),
                                    f_hv[h.hedges()[e].src],
                                    static_cast<int>(e)});
  return detail::extremal_of(wg);
}

// Extremal averages of log m, m = preimage count after one step: the step
// from S to S' contributes log cover_n(S').
inline ExtremalAverages log_m_extremal(const CoverGraph& h) {
  WeightedGraph wg;
  wg.n = static_cast<int>(h.size());
  for (std::size_t e = 0; e < h.hedges().size(); ++e)
    wg.edges.push_back(
        WeightedEdge{static_cast<int>(h.hedges()[e].src),
                     static_cast<int>(h.hedges()[e].dst),
                     std::log(static_cast<double>(h.cover_n(h.hedges()[e].dst))),
                     static_cast<int>(e)});
  return detail::extremal_of(wg);
}

// Exact k-step extrema: A_k/k increases to the infimum average, B_k/k
// decreases to the supremum.
inline std::pair<double, double> finite_horizon(const Presentation& g,
                                                const std::vector<double>& f_sym,
                                                int k) {
  require_essential(g, "finite_horizon");
  if (k < 1) throw Error("finite_horizon: k must be >= 1");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(g.vertex_count(), 0.0), hi(g.vertex_count(), 0.0);
  for (int step = 0; step < k; ++step) {
    std::vector<double> nlo(g.vertex_count(), kInf), nhi(g.vertex_count(), -kInf);
    for (const Edge& e : g.edges()) {
      nlo[e.src] = std::min(nlo[e.src], f_sym[e.label] + lo[e.dst]);
      nhi[e.src] = std::max(nhi[e.src], f_sym[e.label] + hi[e.dst]);
    }
    lo = std::move(nlo);
    hi = std::move(nhi);
  }
  double a = kInf, b = -kInf;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    a = std::min(a, lo[v]);
    b = std::max(b, hi[v]);
  }
  return {a / k, b / k};
}

inline std::pair<double, double> finite_horizon(const CoverGraph& h,
                                                const std::vector<double>& f_hv,
                                                int k) {
  if (k < 1) throw Error("finite_horizon: k must be >= 1");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // k vertices = k-1 steps; seed with the vertex value itself
  std::vector<double> lo(h.size()), hi(h.size());
  for (uint32_t v = 0; v < h.size(); ++v) lo[v] = hi[v] = f_hv[v];
  for (int step = 1; step < k; ++step) {
    std::vector<double> nlo(h.size(), kInf), nhi(h.size(), -kInf);
    for (const HEdge& e : h.hedges()) {
      nlo[e.src] = std::min(nlo[e.src], f_hv[e.src] + lo[e.dst]);
      nhi[e.src] = std::max(nhi[e.src], f_hv[e.src] + hi[e.dst]);
    }
    lo = std::move(nlo);
    hi = std::move(nhi);
  }
  double a = kInf, b = -kInf;
  for (uint32_t v = 0; v < h.size(); ++v) {
    a = std::min(a, lo[v]);
    b = std::max(b, hi[v]);
  }
  return {a / k, b / k};
}

}  // namespace kmslab
