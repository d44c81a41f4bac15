#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kmslab/cover.hpp"
#include "kmslab/growth.hpp"
#include "kmslab/presentation.hpp"
#include "kmslab/ruelle.hpp"

namespace kmslab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo <= hi); }
  bool contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
};

// One affine admissibility condition on the inverse temperature, already
// solved for beta within its sign region.
struct BetaConstraint {
  std::string kind;         // growth-upper | degree-lower | inf-growth-lower | zero-growth
  std::string description;  // rendered inequality
  bool positive_region = true;
  Interval allowed;  // beta values compatible with the constraint, within region
};

struct BetaWindow {
  std::vector<BetaConstraint> constraints;
  std::vector<Interval> intervals;  // at most one per sign region, ascending
  bool empty() const { return intervals.empty(); }
  bool contains(double beta, double slack) const {
    for (const Interval& iv : intervals)
      if (iv.contains(beta, slack)) return true;
    return false;
  }
};

namespace detail {

constexpr double kTiny = 1e-300;

// intersect `iv` with coef*beta <= bound (or >=), knowing the sign region
inline void clamp(Interval& iv, double coef, double bound, bool upper) {
  if (coef == 0.0) {
    bool holds = upper ? (0.0 <= bound) : (0.0 >= bound);
    if (!holds) iv = Interval{1.0, 0.0};  // empty
    return;
  }
  double cut = bound / coef;
  bool cut_is_upper = upper == (coef > 0.0);
  if (cut_is_upper)
    iv.hi = std::min(iv.hi, cut);
  else
    iv.lo = std::max(iv.lo, cut);
}

}  // namespace detail

// Admissibility window from the growth and average invariants: on each sign
// region the inverse temperature of a fixed state is squeezed between the
// preimage growth rates and the extremal potential averages. beta = 0 is
// always excluded.
inline BetaWindow beta_window(const GrowthRates& rates, double a_f, double b_f,
                              double a_log_m, double slack = 1e-9) {
  BetaWindow w;
  const double h_m = rates.h_m;
  const double g_min = rates.g_min;
  char buf[160];

  auto add = [&](bool pos, const char* kind, const char* text, double coef,
                 double bound, bool upper) {
    Interval iv = pos ? Interval{detail::kTiny, detail::kInf}
                      : Interval{-detail::kInf, -detail::kTiny};
    detail::clamp(iv, coef, bound, upper);
    w.constraints.push_back(BetaConstraint{kind, text, pos, iv});
  };

  // beta > 0: A_F beta <= h_m ; A_log_m <= B_F beta ; g_min <= B_F beta
  std::snprintf(buf, sizeof buf, "beta*A_F <= h_m = %.12g", h_m);
  add(true, "growth-upper", buf, a_f, h_m, true);
  std::snprintf(buf, sizeof buf, "beta*B_F >= A_log_m = %.12g", a_log_m);
  add(true, "degree-lower", buf, b_f, a_log_m, false);
  std::snprintf(buf, sizeof buf, "beta*B_F >= g_min = %.12g", g_min);
  add(true, "inf-growth-lower", buf, b_f, g_min, false);

  // beta < 0 mirror: B_F beta <= h_m ; A_log_m <= A_F beta ; g_min <= A_F beta
  std::snprintf(buf, sizeof buf, "beta*B_F <= h_m = %.12g", h_m);
  add(false, "growth-upper", buf, b_f, h_m, true);
  std::snprintf(buf, sizeof buf, "beta*A_F >= A_log_m = %.12g", a_log_m);
  add(false, "degree-lower", buf, a_f, a_log_m, false);
  std::snprintf(buf, sizeof buf, "beta*A_F >= g_min = %.12g", g_min);
  add(false, "inf-growth-lower", buf, a_f, g_min, false);

  if (std::abs(h_m) <= slack && !(a_f <= slack && b_f >= -slack)) {
    // zero growth and sign-definite averages exclude every beta
    w.constraints.push_back(BetaConstraint{
        "zero-growth", "h_m = 0 with sign-definite averages excludes all beta",
        true, Interval{1.0, 0.0}});
    w.constraints.push_back(BetaConstraint{
        "zero-growth", "h_m = 0 with sign-definite averages excludes all beta",
        false, Interval{1.0, 0.0}});
  }

  for (bool pos : {false, true}) {
    Interval iv = pos ? Interval{detail::kTiny, detail::kInf}
                      : Interval{-detail::kInf, -detail::kTiny};
    for (const BetaConstraint& c : w.constraints) {
      if (c.positive_region != pos) continue;
      iv.lo = std::max(iv.lo, c.allowed.lo);
      iv.hi = std::min(iv.hi, c.allowed.hi);
    }
    if (!iv.empty()) w.intervals.push_back(iv);
  }
  return w;
}

// ---- root solving -----------------------------------------------------------

struct BetaRoot {
  double beta = 0.0;
  double rho = 1.0;
  double rho_residual = 0.0;
  bool certified = false;
};

struct SolveResult {
  std::vector<BetaRoot> roots;
  bool certified_mode = false;
  Interval bracket{0.0, 0.0};
  double rho_at_lo = 0.0;
  double rho_at_hi = 0.0;
  bool no_root_certified = false;  // certified: rho != 1 on the whole bracket
  std::string note;
};

// Certified search for rho(L_{-beta F}) = 1. For sign-definite potentials
// log rho is strictly monotone in beta, so one bisection decides everything;
// endpoint values double as a nonexistence certificate. Indefinite
// potentials get a best-effort grid plus refinement.
inline SolveResult solve_beta(const CoverGraph& h, const Potential& f,
                              Interval bracket, double tol = 1e-8) {
  if (!(bracket.lo < bracket.hi)) throw Error("solve_beta: bad bracket");
  SolveResult out;
  out.bracket = bracket;
  auto log_rho = [&](double beta) {
    return std::log(transfer_rho(transfer_matrix(h, f, beta)));
  };
  const bool pos = f.strictly_positive();
  const bool neg = f.strictly_negative();
  out.certified_mode = pos || neg;

  double glo = log_rho(bracket.lo);
  double ghi = log_rho(bracket.hi);
  out.rho_at_lo = std::exp(glo);
  out.rho_at_hi = std::exp(ghi);

  if (out.certified_mode) {
    // decreasing in beta for F > 0, increasing for F < 0
    double first = pos ? glo : ghi;   // larger end of log rho
    double last = pos ? ghi : glo;    // smaller end
    if (first < 0.0 || last > 0.0) {
      out.no_root_certified = true;
      out.note = "monotone log rho misses zero on the bracket";
      return out;
    }
    double a = bracket.lo, b = bracket.hi;
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b));
         ++it) {
      double mid = 0.5 * (a + b);
      double g = log_rho(mid);
      bool left_of_root = pos ? (g > 0.0) : (g < 0.0);
      if (left_of_root)
        a = mid;
      else
        b = mid;
    }
    double root = 0.5 * (a + b);
    double rho = std::exp(log_rho(root));
    if (std::abs(rho - 1.0) <= tol)
      out.roots.push_back(BetaRoot{root, rho, std::abs(rho - 1.0), true});
    else {
      out.no_root_certified = false;
      out.note = "bisection stalled above tolerance";
    }
    return out;
  }

  // best effort: 512-point grid, refine the sign changes of log rho
  const int steps = 512;
  double prev_b = bracket.lo, prev_g = glo;
  for (int i = 1; i <= steps; ++i) {
    double b = bracket.lo + (bracket.hi - bracket.lo) * i / steps;
    if (std::abs(b) < 1e-9) continue;  // beta = 0 excluded
    double g = log_rho(b);
    if ((prev_g <= 0 && g >= 0) || (prev_g >= 0 && g <= 0)) {
      double x0 = prev_b, x1 = b, g0 = prev_g;
      for (int it = 0; it < 200 && (x1 - x0) > 1e-14 * std::max(1.0, std::abs(x1));
           ++it) {
        double mid = 0.5 * (x0 + x1);
        double gm = log_rho(mid);
        if ((g0 <= 0) == (gm <= 0)) {
          x0 = mid;
          g0 = gm;
        } else {
          x1 = mid;
        }
      }
      double root = 0.5 * (x0 + x1);
      double rho = std::exp(log_rho(root));
      if (std::abs(rho - 1.0) <= tol &&
          (out.roots.empty() ||
           std::abs(out.roots.back().beta - root) > 1e-7))
        out.roots.push_back(BetaRoot{root, rho, std::abs(rho - 1.0), false});
    }
    prev_b = b;
    prev_g = g;
  }
  return out;
}

// ---- restricted subsystems ---------------------------------------------------

// Keep a backward-closed set of hvertices: every in-edge of a kept vertex
// must come from a kept vertex, which is exactly invariance of the target
// set under the extension map's preimages.
inline CoverGraph restrict_subsystem(const CoverGraph& h,
                                     const std::vector<uint32_t>& keep) {
  std::vector<bool> in(h.size(), false);
  for (uint32_t v : keep) {
    if (v >= h.size()) throw Error("restrict_subsystem: bad hvertex id");
    in[v] = true;
  }
  for (const HEdge& e : h.hedges())
    if (in[e.dst] && !in[e.src])
      throw Error("restrict_subsystem: set is not backward-closed (in-edge of " +
                  h.hvertex_name(e.dst) + " leaves the set)");
  std::vector<VertexSet> hv;
  std::vector<bool> canon;
  std::vector<std::optional<EpPoint>> wit;
  std::vector<uint32_t> remap(h.size(), kNoHVertex);
  for (uint32_t v = 0; v < h.size(); ++v) {
    if (!in[v]) continue;
    remap[v] = static_cast<uint32_t>(hv.size());
    hv.push_back(h.hvertices()[v]);
    canon.push_back(h.canonical(v));
    wit.push_back(h.witness(v));
  }
  std::vector<HEdge> he;
  for (const HEdge& e : h.hedges())
    if (in[e.dst]) he.push_back(HEdge{remap[e.src], e.label, remap[e.dst]});
  try {
    return CoverGraph(h.base(), std::move(hv), std::move(he), std::move(canon),
                      std::move(wit));
  } catch (const Error&) {
    throw Error("restrict_subsystem: restricted graph not essential");
  }
}

// ---- invariant measure witnesses ---------------------------------------------

struct MeasureWitness {
  double s = 0.0;  // weight of the minimizing cycle
  MeanCycleResult min_cycle, max_cycle;
  double beta_integral = 0.0;  // beta * int F dmu
};

// Two-point convex combination of cycle measures interpolating the potential
// average so that beta * int F dmu equals h_m exactly.
inline MeasureWitness measure_witness(const ExtremalAverages& avgs,
                                      double beta_star, double h_m,
                                      double slack = 1e-9) {
  const double a = avgs.a.value, b = avgs.b.value;
  double lo = beta_star > 0 ? beta_star * a : beta_star * b;
  double hi = beta_star > 0 ? beta_star * b : beta_star * a;
  if (h_m < lo - slack || h_m > hi + slack) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "measure_witness: h_m outside [beta*A, beta*B]: "
                  "h_m=%.12g margins: low %.3g high %.3g",
                  h_m, h_m - lo, hi - h_m);
    throw Error(buf);
  }
  MeasureWitness w;
  w.min_cycle = avgs.a;
  w.max_cycle = avgs.b;
  if (std::abs(b - a) < 1e-15) {
    w.s = 0.5;
  } else {
    w.s = (beta_star * b - h_m) / (beta_star * (b - a));
    w.s = std::min(1.0, std::max(0.0, w.s));
  }
  w.beta_integral = beta_star * (w.s * a + (1.0 - w.s) * b);
  return w;
}

// ---- the full pipeline --------------------------------------------------------

struct KmsOptions {
  double tol_root = 1e-8;
  double tol_eigen = 1e-8;
  double slack = 1e-9;
  int horizon = 12;
  std::optional<Interval> bracket;
  uint64_t seed = 1;
  int sample_points = 10;
};

enum class Verdict { Exists, NotExists, Undetermined };

struct KmsRoot {
  BetaRoot root;
  FixedState state;
  FixedStateReport verification;
  std::optional<MeasureWitness> witness;
  std::string witness_note;
  bool in_window = true;
};

struct KmsAnalysis {
  Presentation input;           // essentialized original
  HigherBlock recoding;         // identity when no recoding was needed
  Potential potential_depth1;   // working potential
  CoverGraph cover;
  GrowthRates rates;
  ExtremalAverages f_averages;      // A_F, B_F
  ExtremalAverages log_m_averages;  // A_log_m, B_log_m
  BetaWindow window;
  SolveResult solve;
  std::vector<KmsRoot> roots;
  ExtensionReport extension;
  Verdict verdict = Verdict::Undetermined;
  bool window_empty_certificate = false;
  bool no_root_certificate = false;
  bool internal_check_failed = false;
  std::string note;
};

namespace detail {

inline std::vector<EpPoint> seeded_sample(const Presentation& g,
                                          const CoverGraph& h, int wanted,
                                          uint64_t seed) {
  std::vector<EpPoint> sample;
  for (uint32_t v = 0; v < h.size() && sample.size() < 8; ++v)
    if (h.witness(v)) sample.push_back(*h.witness(v));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> hlen(0, 3), clen(1, 4);
  std::uniform_int_distribution<Symbol> sym(0, static_cast<Symbol>(g.symbol_count() - 1));
  int attempts = 0;
  while (static_cast<int>(sample.size()) < wanted && attempts++ < 400) {
    std::vector<Symbol> u(hlen(rng)), v(clen(rng));
    for (auto& s : u) s = sym(rng);
    for (auto& s : v) s = sym(rng);
    EpPoint x(u, v);
    if (!in_shift(g, x)) continue;
    if (std::find(sample.begin(), sample.end(), x) != sample.end()) continue;
    sample.push_back(x);
  }
  return sample;
}

}  // namespace detail

inline KmsAnalysis kms_report(const Presentation& g_raw, const Potential& f_raw,
                              const KmsOptions& opt = {}) {
  Presentation ess = essentialize(g_raw);
  const bool label_kind = f_raw.kind == Potential::Kind::Label;
  const bool recode = label_kind && f_raw.depth > 1;
  HigherBlock hb = higher_block(ess, recode ? f_raw.depth : 1);
  Potential f1 = recode ? recode_potential(ess, hb, f_raw) : f_raw;
  CoverGraph cover = build_cover(hb.graph);
  KmsAnalysis an{std::move(ess),     std::move(hb),      std::move(f1),
                 std::move(cover),   GrowthRates{},      ExtremalAverages{},
                 ExtremalAverages{}, BetaWindow{},       SolveResult{},
                 {},                 ExtensionReport{}};
  const Presentation& g = an.recoding.graph;
  const Potential& f = an.potential_depth1;

  an.rates = growth_rates(an.cover, opt.horizon);
  if (label_kind)
    an.f_averages = extremal_birkhoff(g, resolve_depth1(g, f));
  else
    an.f_averages = extremal_birkhoff(an.cover, resolve_cover_potential(an.cover, f));
  an.log_m_averages = log_m_extremal(an.cover);

  an.window = beta_window(an.rates, an.f_averages.a.value, an.f_averages.b.value,
                          an.log_m_averages.a.value, opt.slack);
  an.window_empty_certificate = an.window.empty();

  const bool pos = f.strictly_positive();
  const bool neg = f.strictly_negative();
  Interval bracket;
  if (opt.bracket) {
    bracket = *opt.bracket;
  } else if (pos) {
    double fmin = std::numeric_limits<double>::infinity();
    for (const auto& [k, v] : f.table) fmin = std::min(fmin, v);
    bracket = Interval{1e-6, std::max(50.0, (an.rates.h_m + 1.0) / fmin)};
  } else if (neg) {
    double fmax = -std::numeric_limits<double>::infinity();
    for (const auto& [k, v] : f.table) fmax = std::max(fmax, v);
    bracket = Interval{std::min(-50.0, (an.rates.h_m + 1.0) / fmax), -1e-6};
  } else {
    bracket = Interval{-20.0, 20.0};
  }
  an.solve = solve_beta(an.cover, f, bracket, opt.tol_root);
  an.no_root_certificate = an.solve.no_root_certified;

  for (const BetaRoot& r : an.solve.roots) {
    KmsRoot kr;
    kr.root = r;
    TransferMatrix tm = transfer_matrix(an.cover, f, r.beta);
    kr.state = fixed_state(tm, 1.0, opt.tol_eigen);
    kr.verification =
        verify_fixed_state(an.cover, tm, kr.state.u, 1.0, opt.tol_eigen);
    kr.in_window = an.window.contains(r.beta, opt.slack + 1e-9 * std::abs(r.beta));
    if (!kr.in_window) an.internal_check_failed = true;
    try {
      kr.witness = measure_witness(an.f_averages, r.beta, an.rates.h_m,
                                   1e-6 + opt.slack);
    } catch (const Error& e) {
      kr.witness_note = e.what();
    }
    an.roots.push_back(std::move(kr));
  }

  an.extension = verify_extension(
      g, an.cover, detail::seeded_sample(g, an.cover, opt.sample_points, opt.seed));
  if (!an.extension.all_pass) an.internal_check_failed = true;

  bool verified_root = false;
  for (const KmsRoot& kr : an.roots)
    if (kr.verification.pass && kr.root.rho_residual <= opt.tol_root)
      verified_root = true;

  if (verified_root) {
    an.verdict = Verdict::Exists;
  } else if (an.roots.empty() &&
             (an.window_empty_certificate ||
              (an.solve.certified_mode && an.solve.no_root_certified &&
               [&] {
                 // the certified scan must cover the window
                 for (const Interval& iv : an.window.intervals)
                   if (iv.lo < an.solve.bracket.lo - opt.slack ||
                       iv.hi > an.solve.bracket.hi + opt.slack)
                     return false;
                 return true;
               }()))) {
    an.verdict = Verdict::NotExists;
  } else {
    an.verdict = Verdict::Undetermined;
  }
  return an;
}

// rho as a function of beta, for curve output; adjacent rows obey the
// Lipschitz bound |rho(t) - rho(t')| <= |t - t'| * sup|F|.
struct CurveRow {
  double beta, rho, cw_lower, cw_upper;
};

inline std::vector<CurveRow> rho_curve(const CoverGraph& h, const Potential& f,
                                       double b0, double b1, int steps) {
  if (steps < 1 || !(b0 <= b1)) throw Error("rho_curve: bad grid");
  std::vector<CurveRow> rows;
  for (int i = 0; i <= steps; ++i) {
    double beta = b0 + (b1 - b0) * i / std::max(1, steps);
    SpectralSummary s = spectral_summary(transfer_matrix(h, f, beta).m);
    rows.push_back(CurveRow{beta, s.rho, s.lower, s.upper});
  }
  return rows;
}

}  // namespace kmslab
