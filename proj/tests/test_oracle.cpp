#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace kmstest;

TEST_CASE("brute preimage enumeration") {
  SECTION("full shift counts 2^n") {
    Presentation g = full2();
    EpPoint x = parse_point(g, "(0)");
    for (int n : {1, 3, 6})
      CHECK(oracle::brute_preimages(g, x, n).count == (std::size_t{1} << n));
  }
  SECTION("tail shift counts n+1") {
    Presentation g = cyc0();
    EpPoint x = parse_point(g, "(0)");
    for (int n = 1; n <= 12; ++n)
      CHECK(oracle::brute_preimages(g, x, n).count ==
            static_cast<std::size_t>(n) + 1);
  }
  SECTION("even shift: only 0 prepends to 01(0)") {
    Presentation g = even_shift();
    auto r = oracle::brute_preimages(g, parse_point(g, "01(0)"), 1);
    REQUIRE(r.count == 1);
    CHECK(r.words[0] == std::vector<Symbol>{0});
  }
  SECTION("budget exceeded raises") {
    oracle::OracleBudget tight;
    tight.max_word_len = 3;
    CHECK_THROWS_AS(oracle::brute_preimages(full2(), parse_point(full2(), "(0)"),
                                            5, tight),
                    BudgetExceeded);
  }
  SECTION("counts agree with cover path counts at the lift, k <= 10") {
    for (const Presentation& g : {full2(), even_shift(), gm(), cyc0()}) {
      CoverGraph h = build_cover(g);
      for (uint32_t v = 0; v < h.size(); ++v) {
        if (!h.witness(v)) continue;
        EpPoint x = *h.witness(v);
        uint32_t start = canonical_lift(h, x).state_at(0);
        // count k-step in-paths of the cover at the lift start
        std::vector<double> cnt(h.size(), 0.0);
        cnt[start] = 1.0;
        for (int k = 1; k <= 10; ++k) {
          std::vector<double> next(h.size(), 0.0);
          for (const HEdge& e : h.hedges()) next[e.src] += cnt[e.dst];
          cnt = std::move(next);
          double total = 0.0;
          for (double c : cnt) total += c;
          CHECK(static_cast<std::size_t>(total) ==
                oracle::brute_preimages(g, x, k).count);
        }
      }
    }
  }
}

TEST_CASE("brute cover structure on fixtures") {
  SECTION("full shift: one vertex, two loops") {
    CoverGraph h = oracle::brute_cover(full2());
    CHECK(h.size() == 1);
    CHECK(h.hedges().size() == 2);
  }
  SECTION("even shift: the three predecessor sets and five in-edges") {
    CoverGraph h = oracle::brute_cover(even_shift());
    CHECK(h.size() == 3);
    CHECK(h.hedges().size() == 5);
  }
  SECTION("tail shift: two sets, three in-edges") {
    CoverGraph h = oracle::brute_cover(cyc0());
    CHECK(h.size() == 2);
    CHECK(h.hedges().size() == 3);
  }
}

TEST_CASE("brute rho brackets") {
  SECTION("full shift at beta 0 is exactly 2") {
    auto br = oracle::brute_rho(full2(), {1.0, 1.0}, 10);
    CHECK_THAT(br.lower, Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(br.upper, Catch::Matchers::WithinAbs(2.0, 1e-12));
  }
  SECTION("even shift bracket holds the golden ratio at horizon 12") {
    auto br = oracle::brute_rho(even_shift(), {1.0, 1.0}, 12);
    CHECK(br.lower <= 1.6180339888);
    CHECK(1.6180339887 <= br.upper);
  }
  SECTION("horizon 1 gives row-sum extremes on the cover") {
    CoverGraph h = build_cover(even_shift());
    std::vector<double> w(h.hedges().size(), 1.0);
    auto br = oracle::brute_rho_cover(h, w, 1);
    CHECK_THAT(br.lower, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(br.upper, Catch::Matchers::WithinAbs(2.0, 1e-12));
  }
}

TEST_CASE("brute cycles enumerates simple cycles") {
  SECTION("single loop") {
    WeightedGraph g;
    g.n = 1;
    g.edges = {WeightedEdge{0, 0, 0.75, 0}};
    auto survey = oracle::brute_cycles(g);
    REQUIRE(survey.cycles.size() == 1);
    CHECK(survey.min_mean == 0.75);
  }
  SECTION("forbidden-11 shift with values 1 and 3 has means 1 and 2") {
    Presentation g = gm();
    std::vector<double> f = {1.0, 3.0};
    WeightedGraph wg;
    wg.n = static_cast<int>(g.vertex_count());
    for (std::size_t e = 0; e < g.edges().size(); ++e)
      wg.edges.push_back(WeightedEdge{static_cast<int>(g.edges()[e].src),
                                      static_cast<int>(g.edges()[e].dst),
                                      f[g.edges()[e].label],
                                      static_cast<int>(e)});
    auto survey = oracle::brute_cycles(wg);
    REQUIRE(survey.cycles.size() == 2);
    CHECK_THAT(survey.min_mean, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(survey.max_mean, Catch::Matchers::WithinAbs(2.0, 1e-12));
  }
}

TEST_CASE("oracle and main paths agree on random presentations") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> bdist(-0.5, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    Presentation g = random_presentation(rng, 4, 3);
    CoverGraph h = build_cover(g);
    // preimage counts at a handful of points
    for (uint32_t v = 0; v < h.size() && v < 2; ++v) {
      if (!h.witness(v)) continue;
      EpPoint x = *h.witness(v);
      CHECK(preimage_count(g, x) ==
            static_cast<int>(oracle::brute_preimages(g, x, 1).count));
    }
    // rho bracket contains the transfer spectral radius
    Potential f = random_positive_potential(rng, g, 1);
    double beta = bdist(rng);
    double rho = transfer_rho(transfer_matrix(h, f, beta));
    std::vector<double> fv = resolve_depth1(g, f);
    std::vector<double> w(fv.size());
    for (std::size_t a = 0; a < fv.size(); ++a) w[a] = std::exp(-beta * fv[a]);
    auto br = oracle::brute_rho(g, w, 9);
    CHECK(br.lower <= rho * (1 + 1e-9));
    CHECK(rho <= br.upper * (1 + 1e-9));
  }
}
