// kmslab: predecessor-set covers, preimage growth, transfer spectra and
// admissible KMS inverse temperatures for sofic shift presentations.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kmslab/json_io.hpp"
#include "kmslab/kmslab.hpp"

namespace {

using namespace kmslab;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotExists = 3;
constexpr int kExitUndetermined = 4;
constexpr int kExitInternal = 5;

struct GridSpec {
  double lo = 0.0, hi = 1.0;
  int steps = 10;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &g.lo, &g.hi, &g.steps) != 3 ||
      g.steps < 1 || !(g.lo <= g.hi))
    throw Error("grid must be a:b:steps with a <= b, steps >= 1");
  return g;
}

Interval parse_bracket(const std::string& text) {
  Interval iv;
  if (std::sscanf(text.c_str(), "%lf:%lf", &iv.lo, &iv.hi) != 2 ||
      !(iv.lo < iv.hi))
    throw Error("bracket must be a:b with a < b");
  return iv;
}

int run(int argc, char** argv) {
  CLI::App app{"sofic shift covers, transfer spectra and KMS temperatures"};
  app.require_subcommand(1);

  std::string presentation_path, potential_path, point_text, grid_text,
      bracket_text, format = "json";
  double beta = 0.0, tol = 1e-8;
  int horizon = 12, steps = 12;
  std::size_t budget_count = 6000000;
  std::size_t budget_len = 14;
  uint64_t seed = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_potential) {
    cmd->add_option("presentation", presentation_path, "presentation JSON file")
        ->required();
    auto* p = cmd->add_option("--potential", potential_path, "potential JSON file");
    if (needs_potential) p->required();
    cmd->add_option("--tol", tol, "root/eigen tolerance");
    cmd->add_option("--seed", seed, "seed for sampled checks");
    cmd->add_option("--format", format, "json|csv");
  };

  auto* cover_cmd = app.add_subcommand("cover", "emit the predecessor-set cover");
  add_common(cover_cmd, false);

  auto* inv_cmd = app.add_subcommand("invariants", "growth and average invariants");
  add_common(inv_cmd, false);
  inv_cmd->add_option("--horizon", horizon, "bracket horizon");

  auto* spec_cmd = app.add_subcommand("spectrum", "transfer spectrum at beta");
  add_common(spec_cmd, true);
  spec_cmd->add_option("--beta", beta, "inverse temperature");
  spec_cmd->add_option("--grid", grid_text, "a:b:steps for a CSV rho curve");

  auto* kms_cmd = app.add_subcommand("kms", "admissible temperatures and verdict");
  add_common(kms_cmd, true);
  kms_cmd->add_option("--bracket", bracket_text, "a:b search bracket");
  kms_cmd->add_option("--horizon", horizon, "bracket horizon");

  auto* curve_cmd = app.add_subcommand("curve", "rho(beta) curve as CSV");
  add_common(curve_cmd, true);
  curve_cmd->add_option("--grid", grid_text, "a:b:steps")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force reference paths");
  oracle_cmd->require_subcommand(1);
  auto* o_pre = oracle_cmd->add_subcommand("preimages", "count n-step preimages");
  o_pre->add_option("presentation", presentation_path)->required();
  o_pre->add_option("--point", point_text, "point literal u(v)")->required();
  o_pre->add_option("-n,--steps", steps, "preimage depth")->required();
  o_pre->add_option("--budget", budget_count);
  auto* o_cov = oracle_cmd->add_subcommand("cover", "cover from enumerated points");
  o_cov->add_option("presentation", presentation_path)->required();
  o_cov->add_option("--budget", budget_len, "max head+cycle length");
  auto* o_rho = oracle_cmd->add_subcommand("rho", "bracket rho by word sums");
  o_rho->add_option("presentation", presentation_path)->required();
  o_rho->add_option("--potential", potential_path)->required();
  o_rho->add_option("--beta", beta)->required();
  o_rho->add_option("-n,--steps", steps, "horizon");
  o_rho->add_option("--budget", budget_count);
  auto* o_cyc = oracle_cmd->add_subcommand("cycles", "all simple cycle means");
  o_cyc->add_option("presentation", presentation_path)->required();
  o_cyc->add_option("--potential", potential_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cover_cmd) {
      Presentation g = essentialize(load_presentation(presentation_path));
      std::cout << cover_to_json(build_cover(g)).dump(2) << "\n";
      return kExitOk;
    }
    if (*inv_cmd) {
      Presentation g = essentialize(load_presentation(presentation_path));
      Potential f;
      bool have_f = !potential_path.empty();
      if (have_f) f = load_potential(potential_path);
      bool recode = have_f && f.kind == Potential::Kind::Label && f.depth > 1;
      HigherBlock hb = higher_block(g, recode ? f.depth : 1);
      Potential f1 = recode ? recode_potential(g, hb, f) : f;
      CoverGraph cover = build_cover(hb.graph);
      GrowthRates rates = growth_rates(cover, horizon);
      ExtremalAverages logm = log_m_extremal(cover);
      ExtremalAverages favg = logm;
      if (have_f) {
        favg = f1.kind == Potential::Kind::Label
                   ? extremal_birkhoff(hb.graph, resolve_depth1(hb.graph, f1))
                   : extremal_birkhoff(cover, resolve_cover_potential(cover, f1));
      }
      json doc = invariants_to_json(rates, favg, logm);
      if (!have_f) {
        doc.erase("A_F");
        doc.erase("B_F");
      }
      if (format == "csv") {
        std::cout << "quantity,value\n";
        for (auto& [k, v] : doc.items())
          if (v.is_number())
            std::cout << k << ',' << format_sig(v.get<double>()) << "\n";
      } else {
        std::cout << doc.dump(2) << "\n";
      }
      return kExitOk;
    }
    if (*spec_cmd) {
      Presentation g = essentialize(load_presentation(presentation_path));
      Potential f = load_potential(potential_path);
      bool recode = f.kind == Potential::Kind::Label && f.depth > 1;
      HigherBlock hb = higher_block(g, recode ? f.depth : 1);
      Potential f1 = recode ? recode_potential(g, hb, f) : f;
      CoverGraph cover = build_cover(hb.graph);
      if (!grid_text.empty()) {
        GridSpec gs = parse_grid(grid_text);
        std::cout << curve_to_csv(rho_curve(cover, f1, gs.lo, gs.hi, gs.steps));
        return kExitOk;
      }
      SpectralData s = spectral_radius(transfer_matrix(cover, f1, beta));
      if (format == "csv") {
        std::cout << "beta,rho,cw_lower,cw_upper\n"
                  << format_sig(beta) << ',' << format_sig(s.rho) << ','
                  << format_sig(s.cw_lower) << ',' << format_sig(s.cw_upper)
                  << "\n";
      } else {
        std::cout << spectral_to_json(s, cover, beta).dump(2) << "\n";
      }
      return kExitOk;
    }
    if (*curve_cmd) {
      Presentation g = essentialize(load_presentation(presentation_path));
      Potential f = load_potential(potential_path);
      bool recode = f.kind == Potential::Kind::Label && f.depth > 1;
      HigherBlock hb = higher_block(g, recode ? f.depth : 1);
      Potential f1 = recode ? recode_potential(g, hb, f) : f;
      CoverGraph cover = build_cover(hb.graph);
      GridSpec gs = parse_grid(grid_text);
      std::cout << curve_to_csv(rho_curve(cover, f1, gs.lo, gs.hi, gs.steps));
      return kExitOk;
    }
    if (*kms_cmd) {
      Presentation g = load_presentation(presentation_path);
      Potential f = load_potential(potential_path);
      KmsOptions opt;
      opt.tol_root = tol;
      opt.tol_eigen = tol;
      opt.horizon = horizon;
      opt.seed = seed;
      if (!bracket_text.empty()) opt.bracket = parse_bracket(bracket_text);
      KmsAnalysis an = kms_report(g, f, opt);
      std::cout << kms_to_json(an).dump(2) << "\n";
      if (an.internal_check_failed) return kExitInternal;
      switch (an.verdict) {
        case Verdict::Exists:
          return kExitOk;
        case Verdict::NotExists:
          return kExitNotExists;
        default:
          return kExitUndetermined;
      }
    }
    if (*o_pre) {
      Presentation g = essentialize(load_presentation(presentation_path));
      EpPoint x = parse_point(g, point_text);
      oracle::OracleBudget budget;
      budget.max_count = budget_count;
      budget.max_word_len = static_cast<std::size_t>(steps);
      auto r = oracle::brute_preimages(g, x, steps, budget);
      json words = json::array();
      for (const auto& w : r.words) words.push_back(word_key(g, w));
      std::cout << json{{"count", r.count}, {"words", words}}.dump(2) << "\n";
      return kExitOk;
    }
    if (*o_cov) {
      Presentation g = essentialize(load_presentation(presentation_path));
      oracle::OracleBudget budget;
      budget.max_word_len = budget_len;
      std::cout << cover_to_json(oracle::brute_cover(g, budget)).dump(2) << "\n";
      return kExitOk;
    }
    if (*o_rho) {
      Presentation g = essentialize(load_presentation(presentation_path));
      Potential f = load_potential(potential_path);
      std::vector<double> fv = resolve_depth1(g, f);
      std::vector<double> w(fv.size());
      for (std::size_t a = 0; a < fv.size(); ++a) w[a] = std::exp(-beta * fv[a]);
      oracle::OracleBudget budget;
      budget.max_count = budget_count;
      budget.max_word_len = static_cast<std::size_t>(steps);
      auto r = oracle::brute_rho(g, w, steps, budget);
      std::cout << json{{"lower", num(r.lower)},
                        {"upper", num(r.upper)},
                        {"horizon", r.horizon}}
                       .dump(2)
                << "\n";
      return kExitOk;
    }
    if (*o_cyc) {
      Presentation g = essentialize(load_presentation(presentation_path));
      Potential f = load_potential(potential_path);
      std::vector<double> fv = resolve_depth1(g, f);
      WeightedGraph wg;
      wg.n = static_cast<int>(g.vertex_count());
      for (std::size_t e = 0; e < g.edges().size(); ++e)
        wg.edges.push_back(WeightedEdge{static_cast<int>(g.edges()[e].src),
                                        static_cast<int>(g.edges()[e].dst),
                                        fv[g.edges()[e].label],
                                        static_cast<int>(e)});
      auto survey = oracle::brute_cycles(wg);
      json cycles = json::array();
      for (const auto& c : survey.cycles) cycles.push_back(num(c.mean));
      std::cout << json{{"count", survey.cycles.size()},
                        {"min_mean", num(survey.min_mean)},
                        {"max_mean", num(survey.max_mean)},
                        {"means", cycles}}
                       .dump(2)
                << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
