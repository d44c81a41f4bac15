#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "kmslab/cover.hpp"
#include "kmslab/presentation.hpp"
#include "kmslab/spectral.hpp"

namespace kmslab {

// Finite realization of the weighted preimage-sum operator on functions of
// the cover vertex: entry (i, j) sums e^{-beta F} over the labels a with
// pre_a(S_i) = S_j. Label potentials read the prepended symbol, cover
// potentials the prepended vertex (the source of the in-edge).
struct TransferMatrix {
  double beta = 0.0;
  int n = 0;
  LogMatrix m{0};
  std::vector<double> hedge_exponent;  // per hedge: -beta * F(term)
  bool log_mode = false;               // some |beta*F| exceeded 30

  std::vector<double> linear() const {
    std::vector<double> lin(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (m.nonzero(i, j)) lin[static_cast<std::size_t>(i) * n + j] = std::exp(m.at(i, j));
    return lin;
  }
};

inline std::vector<double> resolve_cover_potential(const CoverGraph& h,
                                                   const Potential& f) {
  if (f.kind != Potential::Kind::CoverVertex)
    throw Error("resolve_cover_potential: expected a cover potential");
  std::vector<double> values(h.size());
  for (uint32_t v = 0; v < h.size(); ++v) {
    auto it = f.table.find(h.hvertex_name(v));
    if (it == f.table.end())
      throw Error("potential: table missing value for cover vertex " +
                  h.hvertex_name(v));
    if (!std::isfinite(it->second))
      throw Error("potential: non-finite value for cover vertex " +
                  h.hvertex_name(v));
    values[v] = it->second;
  }
  return values;
}

inline TransferMatrix transfer_matrix(const CoverGraph& h, const Potential& f,
                                      double beta) {
  TransferMatrix tm;
  tm.beta = beta;
  tm.n = static_cast<int>(h.size());
  tm.m = LogMatrix(tm.n);
  tm.hedge_exponent.resize(h.hedges().size());

  std::vector<double> by_symbol, by_vertex;
  if (f.kind == Potential::Kind::Label)
    by_symbol = resolve_depth1(h.base(), f);
  else
    by_vertex = resolve_cover_potential(h, f);

  double max_abs = 0.0;
  for (std::size_t e = 0; e < h.hedges().size(); ++e) {
    const HEdge& he = h.hedges()[e];
    double fv = f.kind == Potential::Kind::Label ? by_symbol[he.label]
                                                 : by_vertex[he.src];
    double expo = -beta * fv;
    max_abs = std::max(max_abs, std::abs(expo));
    tm.hedge_exponent[e] = expo;
    double& cell = tm.m.at(static_cast<int>(he.dst), static_cast<int>(he.src));
    cell = detail::logsumexp2(cell, expo);
  }
  if (max_abs > 700.0)
    throw Error("transfer_matrix: |beta*F| > 700 would overflow");
  tm.log_mode = max_abs > 30.0;
  return tm;
}

struct SpectralData {
  double rho = 0.0;
  double cw_lower = 0.0;
  double cw_upper = 0.0;
  std::vector<double> right_vec;
  std::vector<double> left_vec;
  double right_residual_inf = 0.0;
  double left_residual_l1 = 0.0;
  bool converged = true;
};

inline double transfer_rho(const TransferMatrix& tm) {
  return spectral_summary(tm.m).rho;
}

inline SpectralData spectral_radius(const TransferMatrix& tm) {
  SpectralData out;
  SpectralSummary s = spectral_summary(tm.m);
  out.rho = s.rho;
  out.cw_lower = s.lower;
  out.cw_upper = s.upper;
  out.converged = s.converged;
  if (s.rho == 0.0) {
    out.left_vec.assign(tm.n, 1.0 / tm.n);
    out.right_vec.assign(tm.n, 0.0);
    out.left_residual_l1 = left_residual_l1(tm.m, 0.0, out.left_vec);
    return out;
  }
  out.left_vec = left_fixed_vector(tm.m, s);
  out.right_vec = right_fixed_vector(tm.m, s);
  out.left_residual_l1 = left_residual_l1(tm.m, s.rho, out.left_vec);
  out.right_residual_inf = right_residual_inf(tm.m, s.rho, out.right_vec);
  return out;
}

// ---- fixed states -----------------------------------------------------------

struct FixedState {
  std::vector<double> u;
  double residual_l1 = 0.0;
  bool within_tol = false;
  int rounds = 0;
};

// Truncated resolvent-series iteration on the dual, t decreasing toward
// rho, then an exact dominant-class construction if the series alone has
// not reached tolerance.
inline FixedState fixed_state(const TransferMatrix& tm, double rho,
                              double tol = 1e-8) {
  if (!(rho > 0.0)) throw Error("fixed_state: rho must be positive");
  FixedState out;
  const int n = tm.n;
  std::vector<double> lin = tm.linear();
  std::vector<double> u0(n, 1.0 / n), u = u0;

  auto row_apply = [&](const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
      if (x[i] == 0.0) continue;
      for (int j = 0; j < n; ++j) y[j] += x[i] * lin[static_cast<std::size_t>(i) * n + j];
    }
    return y;
  };
  auto residual = [&](const std::vector<double>& x) {
    std::vector<double> y = row_apply(x);
    double r = 0.0;
    for (int j = 0; j < n; ++j) r += std::abs(y[j] - rho * x[j]);
    return r;
  };

  for (double eps : {1e-1, 1e-2, 1e-3}) {
    double t = rho * (1.0 + eps);
    std::vector<double> s = u0;
    int cap = static_cast<int>(40.0 / eps) + 50;
    for (int it = 0; it < cap; ++it) {
      std::vector<double> ns = row_apply(s);
      double delta = 0.0;
      for (int j = 0; j < n; ++j) {
        ns[j] = (u0[j] + ns[j]) / t;
        delta += std::abs(ns[j] - s[j]);
      }
      s = std::move(ns);
      if (delta < 1e-15) break;
    }
    double sum = 0.0;
    for (double x : s) sum += x;
    if (sum > 0.0)
      for (double& x : s) x /= sum;
    u = s;
    ++out.rounds;
    if (residual(u) <= tol) break;
  }

  out.residual_l1 = residual(u);
  if (out.residual_l1 > tol) {
    SpectralSummary s = spectral_summary(tm.m);
    std::vector<double> exact = left_fixed_vector(tm.m, s);
    double r = residual(exact);
    if (r < out.residual_l1) {
      u = std::move(exact);
      out.residual_l1 = r;
    }
  }
  out.u = std::move(u);
  out.within_tol = out.residual_l1 <= tol;
  return out;
}

// ---- locally constant functions on the cover --------------------------------

// Functions determined by the first `depth` edges of a path (depth 0:
// functions of the initial vertex). The basis enumerates H-paths.
struct CylinderBasis {
  int depth = 0;
  struct Cyl {
    std::vector<uint32_t> edges;  // hedge ids, length = depth
    uint32_t start = 0;
    uint32_t end = 0;
  };
  std::vector<Cyl> cyls;
  std::map<std::vector<uint32_t>, int> index;

  int find(const std::vector<uint32_t>& edges) const {
    auto it = index.find(edges);
    if (it == index.end()) throw Error("cylinder basis: unknown path");
    return it->second;
  }
};

inline CylinderBasis make_cylinders(const CoverGraph& h, int depth) {
  if (depth < 0 || depth > 8) throw Error("cylinders: depth out of range");
  CylinderBasis basis;
  basis.depth = depth;
  if (depth == 0) {
    for (uint32_t v = 0; v < h.size(); ++v)
      basis.cyls.push_back({{}, v, v});
  } else {
    // grow edge paths
    std::vector<CylinderBasis::Cyl> frontier;
    for (uint32_t e = 0; e < h.hedges().size(); ++e)
      frontier.push_back({{e}, h.hedges()[e].src, h.hedges()[e].dst});
    for (int d = 1; d < depth; ++d) {
      std::vector<CylinderBasis::Cyl> next;
      for (const auto& c : frontier) {
        for (uint32_t e = 0; e < h.hedges().size(); ++e) {
          if (h.hedges()[e].src != c.end) continue;
          auto c2 = c;
          c2.edges.push_back(e);
          c2.end = h.hedges()[e].dst;
          next.push_back(std::move(c2));
        }
      }
      frontier = std::move(next);
    }
    std::sort(frontier.begin(), frontier.end(),
              [](const auto& a, const auto& b) { return a.edges < b.edges; });
    basis.cyls = std::move(frontier);
  }
  for (std::size_t i = 0; i < basis.cyls.size(); ++i)
    basis.index[basis.cyls[i].edges] = static_cast<int>(i);
  return basis;
}

struct LocallyConstant {
  int depth = 0;
  std::vector<double> values;  // aligned with make_cylinders(h, depth)
};

// L_{-beta F} g: one fewer coordinate of dependence; vertex functions map
// to vertex functions through the matrix.
inline LocallyConstant apply_transfer(const CoverGraph& h,
                                      const TransferMatrix& tm,
                                      const LocallyConstant& g) {
  LocallyConstant out;
  out.depth = g.depth > 0 ? g.depth - 1 : 0;
  CylinderBasis from = make_cylinders(h, g.depth);
  CylinderBasis to = make_cylinders(h, out.depth);
  out.values.assign(to.cyls.size(), 0.0);
  if (g.values.size() != from.cyls.size())
    throw Error("apply_transfer: malformed function");
  for (std::size_t ci = 0; ci < to.cyls.size(); ++ci) {
    const auto& c = to.cyls[ci];
    double acc = 0.0;
    for (uint32_t e = 0; e < h.hedges().size(); ++e) {
      if (h.hedges()[e].dst != c.start) continue;
      double w = std::exp(tm.hedge_exponent[e]);
      if (g.depth == 0) {
        acc += w * g.values[h.hedges()[e].src];
      } else {
        std::vector<uint32_t> path{e};
        path.insert(path.end(), c.edges.begin(), c.edges.end());
        path.resize(static_cast<std::size_t>(g.depth));
        acc += w * g.values[from.find(path)];
      }
    }
    out.values[ci] = acc;
  }
  return out;
}

// I_{beta F} g = e^{beta F}/m * g after one shift; left inverse of the
// transfer operator, one more coordinate of dependence.
inline LocallyConstant apply_section(const CoverGraph& h,
                                     const TransferMatrix& tm,
                                     const LocallyConstant& g) {
  LocallyConstant out;
  out.depth = g.depth + 1;
  CylinderBasis from = make_cylinders(h, g.depth);
  CylinderBasis to = make_cylinders(h, out.depth);
  if (g.values.size() != from.cyls.size())
    throw Error("apply_section: malformed function");
  out.values.assign(to.cyls.size(), 0.0);
  for (std::size_t ci = 0; ci < to.cyls.size(); ++ci) {
    const auto& c = to.cyls[ci];
    uint32_t e0 = c.edges.front();
    double w = std::exp(-tm.hedge_exponent[e0]) /
               static_cast<double>(h.cover_n(h.hedges()[e0].dst));
    double gv;
    if (g.depth == 0) {
      gv = g.values[h.hedges()[e0].dst];
    } else {
      std::vector<uint32_t> rest(c.edges.begin() + 1, c.edges.end());
      gv = g.values[from.find(rest)];
    }
    out.values[ci] = w * gv;
  }
  return out;
}

// The state defined by a left fixed vector, evaluated on cylinder masses:
// mass[c] = rho^{-d} e^{sum of edge exponents} u(end of c).
inline std::vector<double> state_masses(const CoverGraph& h,
                                        const TransferMatrix& tm, double rho,
                                        const std::vector<double>& u,
                                        const CylinderBasis& basis) {
  std::vector<double> mass(basis.cyls.size());
  for (std::size_t i = 0; i < basis.cyls.size(); ++i) {
    double expo = 0.0;
    for (uint32_t e : basis.cyls[i].edges) expo += tm.hedge_exponent[e];
    mass[i] = std::pow(rho, -basis.depth) * std::exp(expo) *
              u[basis.cyls[i].end];
  }
  return mass;
}

struct FixedStateReport {
  double eigen_l1 = 0.0;                 // |uM - rho u|_1
  double transfer_functional_l1 = 0.0;   // |chi(Lf) - rho chi(f)| over depth<=2
  double section_functional_l1 = 0.0;    // |chi(If) - chi(f)/rho| over depth<=2
  std::vector<double> kstep;             // |u M^k 1 - rho^k|, k = 1..4
  double max_residual = 0.0;
  bool pass = false;
};

// Residual checks of the fixed-state equations on a spanning family of
// depth <= 2 cylinder indicators, plus the k-step normalization.
inline FixedStateReport verify_fixed_state(const CoverGraph& h,
                                           const TransferMatrix& tm,
                                           const std::vector<double>& u,
                                           double rho = 1.0,
                                           double tol = 1e-8) {
  FixedStateReport rep;
  std::vector<double> lin = tm.linear();
  const int n = tm.n;
  {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) y[j] += u[i] * lin[static_cast<std::size_t>(i) * n + j];
    for (int j = 0; j < n; ++j) rep.eigen_l1 += std::abs(y[j] - rho * u[j]);
  }
  for (int d = 0; d <= 2; ++d) {
    CylinderBasis basis = make_cylinders(h, d);
    std::vector<double> mass = state_masses(h, tm, rho, u, basis);
    for (std::size_t i = 0; i < basis.cyls.size(); ++i) {
      LocallyConstant f;
      f.depth = d;
      f.values.assign(basis.cyls.size(), 0.0);
      f.values[i] = 1.0;
      double chi_f = mass[i];

      LocallyConstant lf = apply_transfer(h, tm, f);
      CylinderBasis lb = make_cylinders(h, lf.depth);
      std::vector<double> lmass = state_masses(h, tm, rho, u, lb);
      double chi_lf = 0.0;
      for (std::size_t j = 0; j < lf.values.size(); ++j)
        chi_lf += lmass[j] * lf.values[j];
      rep.transfer_functional_l1 += std::abs(chi_lf - rho * chi_f);

      LocallyConstant sf = apply_section(h, tm, f);
      CylinderBasis sb = make_cylinders(h, sf.depth);
      std::vector<double> smass = state_masses(h, tm, rho, u, sb);
      double chi_sf = 0.0;
      for (std::size_t j = 0; j < sf.values.size(); ++j)
        chi_sf += smass[j] * sf.values[j];
      rep.section_functional_l1 += std::abs(chi_sf - chi_f / rho);
    }
  }
  {
    LocallyConstant ones;
    ones.depth = 0;
    ones.values.assign(h.size(), 1.0);
    LocallyConstant cur = ones;
    double scale = 1.0;
    for (int k = 1; k <= 4; ++k) {
      cur = apply_transfer(h, tm, cur);
      scale *= rho;
      double chi = 0.0;
      for (uint32_t v = 0; v < h.size(); ++v) chi += u[v] * cur.values[v];
      rep.kstep.push_back(std::abs(chi - scale));
    }
  }
  rep.max_residual = std::max(
      {rep.eigen_l1, rep.transfer_functional_l1, rep.section_functional_l1});
  for (double k : rep.kstep) rep.max_residual = std::max(rep.max_residual, k);
  rep.pass = rep.max_residual <= tol;
  return rep;
}

}  // namespace kmslab
