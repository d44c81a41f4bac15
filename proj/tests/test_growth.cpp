#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace kmstest;

namespace {

constexpr double kGolden = 1.6180339887498948482;

WeightedGraph label_weighted(const Presentation& g,
                             const std::vector<double>& f_sym) {
  WeightedGraph wg;
  wg.n = static_cast<int>(g.vertex_count());
  for (std::size_t e = 0; e < g.edges().size(); ++e)
    wg.edges.push_back(WeightedEdge{static_cast<int>(g.edges()[e].src),
                                    static_cast<int>(g.edges()[e].dst),
                                    f_sym[g.edges()[e].label],
                                    static_cast<int>(e)});
  return wg;
}

}  // namespace

TEST_CASE("growth rates of the fixtures") {
  SECTION("full shift: everything is log 2") {
    GrowthRates r = growth_rates(build_cover(full2()), 12);
    CHECK_THAT(r.h_m, Catch::Matchers::WithinAbs(std::log(2.0), 1e-10));
    CHECK_THAT(r.g_min, Catch::Matchers::WithinAbs(std::log(2.0), 1e-10));
    CHECK(r.g_max == r.h_m);
  }
  SECTION("even shift: log golden ratio") {
    GrowthRates r = growth_rates(build_cover(even_shift()), 12);
    CHECK_THAT(r.h_m, Catch::Matchers::WithinAbs(std::log(kGolden), 1e-9));
    CHECK_THAT(r.g_min, Catch::Matchers::WithinAbs(std::log(kGolden), 1e-9));
  }
  SECTION("tail shift: polynomial preimage growth") {
    GrowthRates r = growth_rates(build_cover(cyc0()), 12);
    CHECK_THAT(r.h_m, Catch::Matchers::WithinAbs(0.0, 1e-10));
    CHECK_THAT(r.g_min, Catch::Matchers::WithinAbs(0.0, 1e-10));
  }
  SECTION("brackets contain the values") {
    for (const Presentation& g : {full2(), even_shift(), gm(), cyc0()}) {
      GrowthRates r = growth_rates(build_cover(g), 10);
      CHECK(r.h_m_bracket.lower <= r.h_m + 1e-12);
      CHECK(r.h_m <= r.h_m_bracket.upper + 1e-12);
      CHECK(r.g_min_bracket.lower <= r.g_min + 1e-12);
      CHECK(r.g_min <= r.g_min_bracket.upper + 1e-12);
      CHECK(0.0 <= r.g_min + 1e-12);
      CHECK(r.g_min <= r.h_m + 1e-12);
    }
  }
  SECTION("horizon below 2 rejected") {
    CHECK_THROWS_AS(growth_rates(build_cover(full2()), 1), Error);
  }
}

TEST_CASE("base brute preimage counts sit inside cover growth") {
  // #psi^{-k}(iota x) = #sigma^{-k}(x): counts along the cover equal literal
  // word enumeration, and the fixture rates match the brute growth window
  for (const Presentation& g : {full2(), even_shift(), gm(), cyc0()}) {
    CoverGraph h = build_cover(g);
    GrowthRates r = growth_rates(h, 12);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (uint32_t v = 0; v < h.size(); ++v) {
      if (!h.witness(v)) continue;
      EpPoint x = *h.witness(v);
      auto pc = oracle::brute_preimages(g, x, 12);
      double rate = std::log(static_cast<double>(pc.count)) / 12.0;
      lo = std::min(lo, rate);
      hi = std::max(hi, rate);
    }
    CHECK(lo <= r.h_m + 1e-9);
    CHECK(r.h_m <= hi + 1e-9);
  }
}

TEST_CASE("extremal averages via mean cycles") {
  SECTION("forbidden-11 shift with values 1 and 3") {
    Presentation g = gm();
    ExtremalAverages avg = extremal_birkhoff(g, {1.0, 3.0});
    CHECK_THAT(avg.a.value, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(avg.b.value, Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK(avg.a.edge_indices.size() == 1);  // the 0-loop at u
    CHECK(avg.b.edge_indices.size() == 2);  // the 2-cycle through w
  }
  SECTION("constant potential collapses the interval") {
    for (const Presentation& g : {full2(), even_shift(), cyc0()}) {
      std::vector<double> c(g.symbol_count(), 0.7);
      ExtremalAverages avg = extremal_birkhoff(g, c);
      CHECK_THAT(avg.a.value, Catch::Matchers::WithinAbs(0.7, 1e-12));
      CHECK_THAT(avg.b.value, Catch::Matchers::WithinAbs(0.7, 1e-12));
    }
  }
  SECTION("log m averages on the even cover") {
    CoverGraph h = build_cover(even_shift());
    ExtremalAverages lm = log_m_extremal(h);
    CHECK_THAT(lm.a.value,
               Catch::Matchers::WithinAbs(0.5 * std::log(2.0), 1e-12));
    CHECK_THAT(lm.b.value, Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
  }
  SECTION("log m averages on the tail shift cover") {
    CoverGraph h = build_cover(cyc0());
    ExtremalAverages lm = log_m_extremal(h);
    CHECK_THAT(lm.a.value, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(lm.b.value, Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
  }
}

TEST_CASE("mean cycles match exhaustive enumeration") {
  SECTION("cover of the even shift with log m weights") {
    CoverGraph h = build_cover(even_shift());
    WeightedGraph wg;
    wg.n = static_cast<int>(h.size());
    for (std::size_t e = 0; e < h.hedges().size(); ++e)
      wg.edges.push_back(WeightedEdge{
          static_cast<int>(h.hedges()[e].src),
          static_cast<int>(h.hedges()[e].dst),
          std::log(static_cast<double>(h.cover_n(h.hedges()[e].dst))),
          static_cast<int>(e)});
    auto survey = oracle::brute_cycles(wg);
    std::set<double> means;
    for (const auto& c : survey.cycles) means.insert(c.mean);
    // three simple cycles: two of mean log 2 and one of mean (log 2)/2
    CHECK(survey.cycles.size() == 3);
    CHECK_THAT(survey.min_mean,
               Catch::Matchers::WithinAbs(0.5 * std::log(2.0), 1e-12));
    CHECK_THAT(survey.max_mean, Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
  }
  SECTION("random weighted graphs, up to 7 vertices") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> nv(1, 7);
    std::uniform_real_distribution<double> wdist(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      WeightedGraph wg;
      wg.n = nv(rng);
      std::uniform_int_distribution<int> pv(0, wg.n - 1);
      std::set<std::pair<int, int>> used;
      // a spanning cycle guarantees at least one cycle
      for (int v = 0; v < wg.n; ++v) used.insert({v, (v + 1) % wg.n});
      std::uniform_int_distribution<int> ne(0, 2 * wg.n);
      for (int e = ne(rng); e > 0; --e) used.insert({pv(rng), pv(rng)});
      int tag = 0;
      for (auto [s, d] : used)
        wg.edges.push_back(WeightedEdge{s, d, wdist(rng), tag++});
      auto lo = min_mean_cycle(wg);
      auto hi = max_mean_cycle(wg);
      auto survey = oracle::brute_cycles(wg);
      REQUIRE(lo);
      REQUIRE(hi);
      CHECK_THAT(lo->value, Catch::Matchers::WithinAbs(survey.min_mean, 1e-9));
      CHECK_THAT(hi->value, Catch::Matchers::WithinAbs(survey.max_mean, 1e-9));
      // the witness cycle realizes the value
      double sum = 0.0;
      for (int e : lo->edges) sum += wg.edges[e].w;
      CHECK_THAT(sum / lo->edges.size(),
                 Catch::Matchers::WithinAbs(lo->value, 1e-9));
    }
  }
}

TEST_CASE("finite horizons sandwich the extremal averages") {
  Presentation g = gm();
  std::vector<double> f = {1.0, 3.0};
  SECTION("one and two step values") {
    auto [a1, b1] = finite_horizon(g, f, 1);
    CHECK(a1 == 1.0);
    CHECK(b1 == 3.0);
    auto [a2, b2] = finite_horizon(g, f, 2);
    CHECK(a2 == 1.0);
    CHECK(b2 == 2.0);
  }
  SECTION("constant potential") {
    std::vector<double> c(2, 0.4);
    for (int k : {1, 2, 5}) {
      auto [a, b] = finite_horizon(g, c, k);
      CHECK_THAT(a, Catch::Matchers::WithinAbs(0.4, 1e-12));
      CHECK_THAT(b, Catch::Matchers::WithinAbs(0.4, 1e-12));
    }
  }
  SECTION("monotone sandwich with doubling horizons") {
    ExtremalAverages avg = extremal_birkhoff(g, f);
    double prev_a = -1e300, prev_b = 1e300;
    for (int k : {1, 2, 4, 8, 16}) {
      auto [ak, bk] = finite_horizon(g, f, k);
      CHECK(ak >= prev_a - 1e-12);
      CHECK(bk <= prev_b + 1e-12);
      CHECK(ak <= avg.a.value + 1e-12);
      CHECK(avg.b.value <= bk + 1e-12);
      prev_a = ak;
      prev_b = bk;
    }
  }
  SECTION("cover-vertex potentials") {
    CoverGraph h = build_cover(even_shift());
    std::vector<double> fv(h.size());
    for (uint32_t v = 0; v < h.size(); ++v)
      fv[v] = std::log(static_cast<double>(h.cover_n(v)));
    // k-vertex sums of log N divided by k approach A_{log N} from below;
    // sanity: horizon-1 extremes are the pointwise extremes
    auto [a1, b1] = finite_horizon(h, fv, 1);
    CHECK_THAT(a1, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(b1, Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
  }
}

TEST_CASE("reducible graphs: per-class Perron data") {
  // two components: a 2-loop vertex feeding a 1-loop vertex
  Presentation g = make_presentation(
      {"0", "1"}, {"a", "b"},
      {{"a", "a", "0"}, {"a", "a", "1"}, {"a", "b", "0"}, {"b", "b", "0"}});
  CoverGraph h = build_cover(g);
  GrowthRates r = growth_rates(h, 10);
  CHECK_THAT(r.h_m, Catch::Matchers::WithinAbs(std::log(2.0), 1e-9));
  // some fiber grows only linearly, so min growth stays at zero? no: every
  // hvertex is reachable from the doubling class here, so g_min = h_m;
  // check monotonicity only
  CHECK(r.g_min >= -1e-12);
  CHECK(r.g_min <= r.h_m + 1e-12);
}
