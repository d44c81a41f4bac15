#pragma once

#include <random>
#include <string>
#include <vector>

#include "kmslab/kmslab.hpp"

namespace kmstest {

using namespace kmslab;

inline std::string fixture(const std::string& name) {
  return std::string(KMSLAB_FIXTURES) + "/" + name;
}

inline Presentation full2() { return load_presentation(fixture("full2.json")); }
inline Presentation full3() { return load_presentation(fixture("full3.json")); }
inline Presentation full5() { return load_presentation(fixture("full5.json")); }
inline Presentation even_shift() { return load_presentation(fixture("even.json")); }
inline Presentation gm() { return load_presentation(fixture("gm.json")); }
inline Presentation cyc0() { return load_presentation(fixture("cyc0.json")); }

inline Potential ones(int n_symbols) {
  Potential f;
  f.kind = Potential::Kind::Label;
  f.depth = 1;
  for (int i = 0; i < n_symbols; ++i) f.table[std::to_string(i)] = 1.0;
  return f;
}

// Random essential presentation: a spanning cycle plus extra random edges,
// then essentialized. Vertices a..e, symbols 0..2.
inline Presentation random_presentation(std::mt19937_64& rng, int max_vertices = 5,
                                        int max_symbols = 3) {
  std::uniform_int_distribution<int> nv(1, max_vertices), ns(2, max_symbols);
  int verts = nv(rng), syms = ns(rng);
  std::vector<std::string> vnames, snames;
  for (int v = 0; v < verts; ++v) vnames.push_back(std::string(1, char('a' + v)));
  for (int s = 0; s < syms; ++s) snames.push_back(std::to_string(s));
  std::uniform_int_distribution<int> pick_v(0, verts - 1), pick_s(0, syms - 1);
  std::set<std::array<std::string, 3>> edges;
  for (int v = 0; v < verts; ++v)
    edges.insert({vnames[v], vnames[(v + 1) % verts], snames[pick_s(rng)]});
  std::uniform_int_distribution<int> extra(verts == 1 ? 1 : 0, 2 * verts);
  int more = extra(rng);
  for (int i = 0; i < more; ++i)
    edges.insert({vnames[pick_v(rng)], vnames[pick_v(rng)], snames[pick_s(rng)]});
  std::vector<std::array<std::string, 3>> edge_list(edges.begin(), edges.end());
  return essentialize(make_presentation(snames, vnames, edge_list));
}

// Strictly positive random potential of depth 1 or 2 on g's words.
inline Potential random_positive_potential(std::mt19937_64& rng,
                                           const Presentation& g,
                                           int max_depth = 2) {
  std::uniform_int_distribution<int> dd(1, max_depth);
  std::uniform_real_distribution<double> val(0.2, 3.0);
  Potential f;
  f.kind = Potential::Kind::Label;
  f.depth = dd(rng);
  for (const auto& w : admissible_words(g, f.depth))
    f.table[word_key(g, w)] = val(rng);
  return f;
}

inline Potential negate(const Potential& f) {
  Potential g = f;
  for (auto& [k, v] : g.table) v = -v;
  return g;
}

}  // namespace kmstest
