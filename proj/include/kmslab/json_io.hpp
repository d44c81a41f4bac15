#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "kmslab/cover.hpp"
#include "kmslab/growth.hpp"
#include "kmslab/kms.hpp"
#include "kmslab/presentation.hpp"
#include "kmslab/ruelle.hpp"

namespace kmslab {

using json = nlohmann::ordered_json;

// Finite doubles stay numbers; anything else is spelled out as a string so
// no information is silently dropped by the JSON encoder.
inline json num(double x) {
  if (std::isfinite(x)) return json(x);
  if (std::isnan(x)) return json("nan");
  return json(x > 0 ? "inf" : "-inf");
}

// ---- input ------------------------------------------------------------------

// {"alphabet": [...], "vertices": [...], "edges": [{"src","dst","label"}]}
inline Presentation presentation_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("alphabet") || !doc.contains("vertices") ||
      !doc.contains("edges"))
    throw Error("presentation: expected alphabet, vertices, edges");
  std::vector<std::string> symbols, vertices;
  for (const auto& s : doc.at("alphabet")) symbols.push_back(s.get<std::string>());
  for (const auto& v : doc.at("vertices")) vertices.push_back(v.get<std::string>());
  if (doc.at("edges").empty()) throw Error("presentation: empty graph");
  std::vector<std::array<std::string, 3>> edges;
  for (const auto& e : doc.at("edges")) {
    if (!e.contains("src") || !e.contains("dst") || !e.contains("label"))
      throw Error("presentation: edge needs src, dst, label");
    edges.push_back({e.at("src").get<std::string>(), e.at("dst").get<std::string>(),
                     e.at("label").get<std::string>()});
  }
  return make_presentation(std::move(symbols), std::move(vertices), edges);
}

inline Presentation load_presentation(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw Error("cannot open " + path);
  std::string text;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, fp)) > 0) text.append(buf, got);
  std::fclose(fp);
  return presentation_from_json(json::parse(text));
}

// {"kind":"label"|"cover", "depth":k, "table":{...}}
inline Potential potential_from_json(const json& doc) {
  Potential f;
  std::string kind = doc.value("kind", "label");
  if (kind == "label")
    f.kind = Potential::Kind::Label;
  else if (kind == "cover")
    f.kind = Potential::Kind::CoverVertex;
  else
    throw Error("potential: kind must be label or cover");
  f.depth = doc.value("depth", 1);
  if (f.kind == Potential::Kind::Label && f.depth < 1)
    throw Error("potential: depth must be >= 1");
  if (!doc.contains("table") || !doc.at("table").is_object() ||
      doc.at("table").empty())
    throw Error("potential: nonempty table required");
  for (const auto& [k, v] : doc.at("table").items()) {
    double x = v.get<double>();
    if (!std::isfinite(x)) throw Error("potential: non-finite value");
    f.table[k] = x;
  }
  return f;
}

inline Potential load_potential(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw Error("cannot open " + path);
  std::string text;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, fp)) > 0) text.append(buf, got);
  std::fclose(fp);
  return potential_from_json(json::parse(text));
}

// ---- output -----------------------------------------------------------------

inline json presentation_to_json(const Presentation& g) {
  json doc;
  doc["alphabet"] = g.symbol_names();
  doc["vertices"] = g.vertex_names();
  json edges = json::array();
  for (const Edge& e : g.edges())
    edges.push_back({{"src", g.vertex_names()[e.src]},
                     {"dst", g.vertex_names()[e.dst]},
                     {"label", g.symbol_names()[e.label]}});
  doc["edges"] = edges;
  return doc;
}

// The cover in the presentation schema plus canonical flags and N values.
inline json cover_to_json(const CoverGraph& h) {
  json doc;
  doc["alphabet"] = h.base().symbol_names();
  json verts = json::array(), edges = json::array();
  json canonical = json::object(), nvals = json::object();
  for (uint32_t v = 0; v < h.size(); ++v) {
    std::string name = h.hvertex_name(v);
    verts.push_back(name);
    canonical[name] = h.canonical(v);
    nvals[name] = h.cover_n(v);
  }
  for (const HEdge& e : h.hedges())
    edges.push_back({{"src", h.hvertex_name(e.src)},
                     {"dst", h.hvertex_name(e.dst)},
                     {"label", h.base().symbol_names()[e.label]}});
  doc["vertices"] = verts;
  doc["edges"] = edges;
  doc["canonical"] = canonical;
  doc["N"] = nvals;
  return doc;
}

inline json bracket_to_json(const Bracket& b) {
  return json{{"lower", num(b.lower)}, {"upper", num(b.upper)},
              {"horizon", b.horizon}};
}

inline json invariants_to_json(const GrowthRates& r, const ExtremalAverages& f,
                               const ExtremalAverages& logm) {
  json doc;
  doc["h_m"] = num(r.h_m);
  doc["g_min"] = num(r.g_min);
  doc["g_max"] = num(r.g_max);
  doc["A_F"] = num(f.a.value);
  doc["B_F"] = num(f.b.value);
  doc["A_log_m"] = num(logm.a.value);
  doc["B_log_m"] = num(logm.b.value);
  doc["brackets"] = {{"h_m", bracket_to_json(r.h_m_bracket)},
                     {"g_min", bracket_to_json(r.g_min_bracket)},
                     {"g_max", bracket_to_json(r.g_max_bracket)}};
  return doc;
}

inline json spectral_to_json(const SpectralData& s, const CoverGraph& h,
                             double beta) {
  json doc;
  doc["beta"] = num(beta);
  doc["rho"] = num(s.rho);
  doc["cw_lower"] = num(s.cw_lower);
  doc["cw_upper"] = num(s.cw_upper);
  json lv = json::object(), rv = json::object();
  for (uint32_t v = 0; v < h.size(); ++v) {
    lv[h.hvertex_name(v)] = num(s.left_vec[v]);
    rv[h.hvertex_name(v)] = num(s.right_vec[v]);
  }
  doc["left_vec"] = lv;
  doc["right_vec"] = rv;
  doc["left_residual_l1"] = num(s.left_residual_l1);
  doc["right_residual_inf"] = num(s.right_residual_inf);
  doc["converged"] = s.converged;
  return doc;
}

inline std::string format_sig(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

inline std::string curve_to_csv(const std::vector<CurveRow>& rows) {
  std::string out = "beta,rho,cw_lower,cw_upper\n";
  for (const CurveRow& r : rows) {
    out += format_sig(r.beta);
    out += ',';
    out += format_sig(r.rho);
    out += ',';
    out += format_sig(r.cw_lower);
    out += ',';
    out += format_sig(r.cw_upper);
    out += '\n';
  }
  return out;
}

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Exists:
      return "exists";
    case Verdict::NotExists:
      return "not-exists";
    default:
      return "undetermined";
  }
}

inline json kms_to_json(const KmsAnalysis& an) {
  json doc;
  doc["verdict"] = verdict_name(an.verdict);
  doc["invariants"] =
      invariants_to_json(an.rates, an.f_averages, an.log_m_averages);

  json cons = json::array();
  for (const BetaConstraint& c : an.window.constraints) {
    cons.push_back({{"kind", c.kind},
                    {"region", c.positive_region ? "beta>0" : "beta<0"},
                    {"condition", c.description},
                    {"allowed", c.allowed.empty()
                                    ? json::array()
                                    : json::array({num(c.allowed.lo),
                                                   num(c.allowed.hi)})}});
  }
  doc["constraints"] = cons;
  json win = json::array();
  for (const Interval& iv : an.window.intervals)
    win.push_back(json::array({num(iv.lo), num(iv.hi)}));
  doc["window"] = win;

  json roots = json::array();
  for (const KmsRoot& r : an.roots) {
    json jr;
    jr["beta"] = num(r.root.beta);
    jr["rho_residual"] = num(r.root.rho_residual);
    jr["certified"] = r.root.certified;
    jr["in_window"] = r.in_window;
    json state = json::object();
    for (uint32_t v = 0; v < an.cover.size(); ++v)
      state[an.cover.hvertex_name(v)] = num(r.state.u[v]);
    jr["eigenstate"] = state;
    jr["eigenstate_residual_l1"] = num(r.state.residual_l1);
    jr["verification"] = {
        {"eigen_l1", num(r.verification.eigen_l1)},
        {"transfer_functional_l1", num(r.verification.transfer_functional_l1)},
        {"section_functional_l1", num(r.verification.section_functional_l1)},
        {"max_residual", num(r.verification.max_residual)},
        {"pass", r.verification.pass}};
    if (r.witness) {
      jr["witness"] = {{"s", num(r.witness->s)},
                       {"beta_integral_F", num(r.witness->beta_integral)},
                       {"min_cycle_mean", num(r.witness->min_cycle.value)},
                       {"max_cycle_mean", num(r.witness->max_cycle.value)}};
    } else if (!r.witness_note.empty()) {
      jr["witness_error"] = r.witness_note;
    }
    roots.push_back(jr);
  }
  doc["roots"] = roots;

  doc["certificates"] = {
      {"window_empty", an.window_empty_certificate},
      {"no_root_in_bracket", an.no_root_certificate},
      {"bracket", json::array({num(an.solve.bracket.lo), num(an.solve.bracket.hi)})},
      {"rho_at_bracket", json::array({num(an.solve.rho_at_lo), num(an.solve.rho_at_hi)})}};
  doc["extension_checks_pass"] = an.extension.all_pass;
  doc["cover_size"] = an.cover.size();
  return doc;
}

}  // namespace kmslab
