#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kmslab/core.hpp"

namespace kmslab {

// Nonnegative matrix stored by log entries; -inf marks a structural zero.
// Everything spectral runs on this representation so that weights e^{-bF}
// far outside double range behave the same as moderate ones.
struct LogMatrix {
  static constexpr double kZero = -std::numeric_limits<double>::infinity();

  int n = 0;
  std::vector<double> w;  // row-major, n*n

  explicit LogMatrix(int size = 0)
      : n(size), w(static_cast<std::size_t>(size) * size, kZero) {}

  double& at(int i, int j) { return w[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const {
    return w[static_cast<std::size_t>(i) * n + j];
  }
  bool nonzero(int i, int j) const { return at(i, j) > kZero; }
};

namespace detail {

inline double logsumexp2(double a, double b) {
  if (a == LogMatrix::kZero) return b;
  if (b == LogMatrix::kZero) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace detail

// ---- strongly connected components -----------------------------------------

// Component ids are assigned in topological order of the digraph
// i -> j iff M(i,j) is nonzero (mass flows i to j under row-vector action).
struct SccDecomposition {
  int count = 0;
  std::vector<int> comp;                   // vertex -> component id
  std::vector<std::vector<int>> members;   // component -> vertices
};

inline SccDecomposition scc_decompose(const LogMatrix& m) {
  const int n = m.n;
  SccDecomposition out;
  out.comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  int next_index = 0;
  std::vector<std::vector<int>> comps;

  // iterative Tarjan, neighbors ascending
  struct Frame {
    int v;
    int next_j;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      bool descended = false;
      while (f.next_j < n) {
        int j = f.next_j++;
        if (!m.nonzero(f.v, j)) continue;
        if (index[j] == -1) {
          index[j] = low[j] = next_index++;
          stack.push_back(j);
          on_stack[j] = true;
          frames.push_back({j, 0});
          descended = true;
          break;
        }
        if (on_stack[j]) low[f.v] = std::min(low[f.v], index[j]);
      }
      if (descended) continue;
      if (low[f.v] == index[f.v]) {
        std::vector<int> comp;
        while (true) {
          int u = stack.back();
          stack.pop_back();
          on_stack[u] = false;
          comp.push_back(u);
          if (u == f.v) break;
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
      int v = f.v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
    }
  }
  // Tarjan emits components in reverse topological order of i->j edges.
  std::reverse(comps.begin(), comps.end());
  out.count = static_cast<int>(comps.size());
  out.members = std::move(comps);
  for (int c = 0; c < out.count; ++c)
    for (int v : out.members[c]) out.comp[v] = c;
  return out;
}

// ---- Perron roots -----------------------------------------------------------

struct PerronResult {
  double rho = 0.0;
  double lower = 0.0;       // Collatz-Wielandt certificates
  double upper = 0.0;
  bool converged = true;
  int iterations = 0;
  std::vector<double> v_log;  // positive eigenvector of the block, log scale
};

// Power iteration on one SCC, shifted by the identity so that imprimitive
// blocks converge; certificates come from the Collatz-Wielandt ratios of
// the unshifted block at the final vector, hence remain rigorous bounds
// whether or not the iteration converged.
inline PerronResult perron_scc(const LogMatrix& m, const std::vector<int>& c,
                               double rel_tol = 1e-12, int max_iter = 100000) {
  PerronResult r;
  const int k = static_cast<int>(c.size());
  if (k == 1 && !m.nonzero(c[0], c[0])) {
    r.v_log.assign(1, 0.0);
    return r;  // trivial class, rho = 0
  }
  double shift = LogMatrix::kZero;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) shift = std::max(shift, m.at(c[a], c[b]));

  std::vector<double> v(k, 0.0), nv(k), ratio(k);
  auto cw = [&](const std::vector<double>& x, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) {
      double acc = LogMatrix::kZero;
      for (int b = 0; b < k; ++b)
        acc = detail::logsumexp2(acc, m.at(c[a], c[b]) + x[b]);
      double rat = acc - x[a];
      lo = std::min(lo, rat);
      hi = std::max(hi, rat);
    }
  };
  double lo = 0, hi = 0;
  for (int it = 0; it < max_iter; ++it) {
    // one step of (M + e^shift I)
    for (int a = 0; a < k; ++a) {
      double acc = shift + v[a];
      for (int b = 0; b < k; ++b)
        acc = detail::logsumexp2(acc, m.at(c[a], c[b]) + v[b]);
      nv[a] = acc;
    }
    double mx = *std::max_element(nv.begin(), nv.end());
    for (int a = 0; a < k; ++a) v[a] = nv[a] - mx;
    r.iterations = it + 1;
    cw(v, lo, hi);
    if (hi - lo <= rel_tol) break;  // log gap = relative gap
  }
  cw(v, lo, hi);
  r.lower = std::exp(lo);
  r.upper = std::exp(hi);
  r.rho = std::exp(0.5 * (lo + hi));
  r.converged = (hi - lo) <= 1e-9;
  r.v_log = v;
  return r;
}

struct SpectralSummary {
  double rho = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool converged = true;
  SccDecomposition scc;
  std::vector<PerronResult> per_class;
  std::vector<int> dominant;  // class ids attaining rho (within 1e-9 rel)
};

inline SpectralSummary spectral_summary(const LogMatrix& m) {
  SpectralSummary s;
  s.scc = scc_decompose(m);
  s.per_class.reserve(s.scc.count);
  for (int c = 0; c < s.scc.count; ++c) {
    s.per_class.push_back(perron_scc(m, s.scc.members[c]));
    const PerronResult& p = s.per_class.back();
    s.rho = std::max(s.rho, p.rho);
    s.converged = s.converged && p.converged;
  }
  for (const PerronResult& p : s.per_class) {
    s.lower = std::max(s.lower, p.lower);
    s.upper = std::max(s.upper, p.upper);
  }
  for (int c = 0; c < s.scc.count; ++c)
    if (s.per_class[c].rho >= s.rho - 1e-9 * std::max(1.0, s.rho))
      s.dominant.push_back(c);
  return s;
}

// ---- fixed vectors ----------------------------------------------------------

namespace detail {

// Solve x A = b for a row vector x, A = (I - B/rho) with spectral radius of
// B/rho < 1; plain partial-pivot LU on the transpose.
inline std::vector<double> solve_row(const std::vector<double>& a_colmajor,
                                     int k, std::vector<double> b) {
  // a_colmajor holds A^T row-major (= A column-major): solve A^T x^T = b^T
  std::vector<double> a = a_colmajor;
  std::vector<int> piv(k);
  for (int i = 0; i < k; ++i) piv[i] = i;
  for (int col = 0; col < k; ++col) {
    int best = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(a[r * k + col]) > std::abs(a[best * k + col])) best = r;
    if (best != col) {
      for (int j = 0; j < k; ++j) std::swap(a[col * k + j], a[best * k + j]);
      std::swap(b[col], b[best]);
    }
    double d = a[col * k + col];
    if (d == 0.0) throw Error("spectral: singular propagation system");
    for (int r = col + 1; r < k; ++r) {
      double f = a[r * k + col] / d;
      if (f == 0.0) continue;
      for (int j = col; j < k; ++j) a[r * k + j] -= f * a[col * k + j];
      b[r] -= f * b[col];
    }
  }
  for (int r = k - 1; r >= 0; --r) {
    double acc = b[r];
    for (int j = r + 1; j < k; ++j) acc -= a[r * k + j] * b[j];
    b[r] = acc / a[r * k + r];
  }
  return b;
}

}  // namespace detail

// Nonnegative left fixed vector u with u M = rho u, normalized to sum 1.
// Seeds are the dominant classes with no other dominant class strictly
// downstream in the flow order (those are the classes that can carry an
// eigenvector); tied seeds get equal mass, and the vector is pushed through
// strictly subdominant downstream classes by direct solves.
inline std::vector<double> left_fixed_vector(const LogMatrix& m,
                                             const SpectralSummary& s) {
  const int n = m.n;
  const int nc = s.scc.count;
  if (s.rho <= 0.0) throw Error("left_fixed_vector: zero spectral radius");

  // condensation reachability (flow order i -> j); component ids are
  // topological, so one backward pass closes the relation
  std::vector<std::vector<bool>> reach(nc, std::vector<bool>(nc, false));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.nonzero(i, j)) reach[s.scc.comp[i]][s.scc.comp[j]] = true;
  for (int c = 0; c < nc; ++c) reach[c][c] = true;
  for (int a = nc - 1; a >= 0; --a)
    for (int b = a + 1; b < nc; ++b)
      if (reach[a][b])
        for (int t = b; t < nc; ++t)
          if (reach[b][t]) reach[a][t] = true;

  std::vector<bool> is_dominant(nc, false);
  for (int c : s.dominant) is_dominant[c] = true;
  std::vector<int> seeds;
  for (int c : s.dominant) {
    bool blocked = false;
    for (int d : s.dominant)
      if (d != c && reach[c][d]) blocked = true;
    if (!blocked) seeds.push_back(c);
  }
  if (seeds.empty()) throw Error("left_fixed_vector: no admissible seed class");

  std::vector<bool> support(nc, false);
  for (int c : seeds) support[c] = true;
  for (int c = 0; c < nc; ++c)
    for (int sd : seeds)
      if (reach[sd][c]) support[c] = true;

  std::vector<double> u(n, 0.0);
  // seed Perron vectors: left eigenvector of the class block via power
  // iteration on the transpose, identity-shifted
  for (int c : seeds) {
    const auto& mem = s.scc.members[c];
    const int k = static_cast<int>(mem.size());
    std::vector<double> x(k, 1.0 / k), nx(k);
    double shift = 0.0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (m.nonzero(mem[a], mem[b]))
          shift = std::max(shift, std::exp(m.at(mem[a], mem[b]) - std::log(s.rho)));
    for (int it = 0; it < 200000; ++it) {
      for (int b = 0; b < k; ++b) {
        double acc = shift * x[b];
        for (int a = 0; a < k; ++a)
          if (m.nonzero(mem[a], mem[b]))
            acc += x[a] * std::exp(m.at(mem[a], mem[b]) - std::log(s.rho));
        nx[b] = acc;
      }
      double sum = 0.0;
      for (double t : nx) sum += t;
      double diff = 0.0;
      for (int b = 0; b < k; ++b) {
        nx[b] /= sum;
        diff += std::abs(nx[b] - x[b]);
      }
      x = nx;
      if (diff < 1e-16) break;
    }
    for (int b = 0; b < k; ++b) u[mem[b]] = x[b] / static_cast<double>(seeds.size());
  }

  // propagate downstream in topological order (ids already topological)
  for (int c = 0; c < nc; ++c) {
    if (!support[c] || is_dominant[c]) continue;
    const auto& mem = s.scc.members[c];
    const int k = static_cast<int>(mem.size());
    // inflow b_j = sum_i u_i M[i][mem[j]] / rho over already-solved i
    std::vector<double> b(k, 0.0);
    for (int i = 0; i < n; ++i) {
      if (s.scc.comp[i] == c || u[i] == 0.0) continue;
      for (int j = 0; j < k; ++j)
        if (m.nonzero(i, mem[j]))
          b[j] += u[i] * std::exp(m.at(i, mem[j]) - std::log(s.rho));
    }
    bool any = false;
    for (double t : b) any = any || t != 0.0;
    if (!any) continue;
    // u_c (I - B/rho) = b  with B the class block
    std::vector<double> at(static_cast<std::size_t>(k) * k, 0.0);  // (I-B/rho)^T
    for (int a = 0; a < k; ++a) {
      for (int j = 0; j < k; ++j) {
        double entry = (a == j) ? 1.0 : 0.0;
        if (m.nonzero(mem[a], mem[j]))
          entry -= std::exp(m.at(mem[a], mem[j]) - std::log(s.rho));
        at[static_cast<std::size_t>(j) * k + a] = entry;  // transpose
      }
    }
    std::vector<double> x = detail::solve_row(at, k, b);
    for (int j = 0; j < k; ++j) u[mem[j]] = x[j];
  }

  double sum = 0.0;
  for (double t : u) sum += t;
  if (!(sum > 0.0)) throw Error("left_fixed_vector: degenerate result");
  for (double& t : u) t /= sum;
  return u;
}

// Nonnegative right fixed vector, M v = rho v, max-normalized. Mirror image
// of the left construction: seeds have no dominant class strictly upstream,
// mass propagates upstream.
inline std::vector<double> right_fixed_vector(const LogMatrix& m,
                                              const SpectralSummary& s) {
  // transpose and reuse
  LogMatrix t(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) t.at(j, i) = m.at(i, j);
  SpectralSummary st = spectral_summary(t);
  std::vector<double> v = left_fixed_vector(t, st);
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, x);
  for (double& x : v) x /= mx;
  return v;
}

// residuals
inline double left_residual_l1(const LogMatrix& m, double rho,
                               const std::vector<double>& u) {
  double r = 0.0;
  for (int j = 0; j < m.n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < m.n; ++i)
      if (m.nonzero(i, j)) acc += u[i] * std::exp(m.at(i, j));
    r += std::abs(acc - rho * u[j]);
  }
  return r;
}

inline double right_residual_inf(const LogMatrix& m, double rho,
                                 const std::vector<double>& v) {
  double r = 0.0;
  for (int i = 0; i < m.n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.n; ++j)
      if (m.nonzero(i, j)) acc += std::exp(m.at(i, j)) * v[j];
    r = std::max(r, std::abs(acc - rho * v[i]));
  }
  return r;
}

}  // namespace kmslab
