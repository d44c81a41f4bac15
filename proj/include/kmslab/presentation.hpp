#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmslab/core.hpp"
#include "kmslab/ep_sequence.hpp"

namespace kmslab {

using Symbol = uint32_t;

// A point of the shift: eventually periodic ray head * cycle^inf over
// symbol ids. The only rays with a finite description; dense in the shift
// space, which is what makes every check in this library a finite one.
using EpPoint = EpSequence<Symbol>;

struct Edge {
  uint32_t src;
  uint32_t dst;
  Symbol label;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Finite labeled graph presenting a one-sided sofic shift: the shift space
// is the set of label sequences of right-infinite edge paths.
class Presentation {
 public:
  Presentation(std::vector<std::string> symbols,
               std::vector<std::string> vertices, std::vector<Edge> edges)
      : symbols_(std::move(symbols)),
        vertices_(std::move(vertices)),
        edges_(std::move(edges)) {
    validate_and_index();
  }

  std::size_t symbol_count() const { return symbols_.size(); }
  std::size_t vertex_count() const { return vertices_.size(); }
  const std::vector<std::string>& symbol_names() const { return symbols_; }
  const std::vector<std::string>& vertex_names() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::optional<Symbol> symbol_id(const std::string& name) const {
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), name);
    if (it == symbols_.end() || *it != name) return std::nullopt;
    return static_cast<Symbol>(it - symbols_.begin());
  }
  std::optional<uint32_t> vertex_id(const std::string& name) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), name);
    if (it == vertices_.end() || *it != name) return std::nullopt;
    return static_cast<uint32_t>(it - vertices_.begin());
  }

  VertexSet full_set() const { return VertexSet::full(vertex_count()); }

  // pre_a(T) = { v : some a-labeled edge v -> v' has v' in T }
  VertexSet pre(Symbol a, const VertexSet& t) const {
    VertexSet r;
    for (uint32_t v : t.members()) r |= pred_[a][v];
    return r;
  }

  // forward step: targets of a-labeled edges out of S
  VertexSet step(Symbol a, const VertexSet& s) const {
    VertexSet r;
    for (uint32_t v : s.members()) r |= succ_[a][v];
    return r;
  }

  std::size_t out_degree(uint32_t v) const { return out_deg_[v]; }
  std::size_t in_degree(uint32_t v) const { return in_deg_[v]; }

  bool is_essential() const {
    for (uint32_t v = 0; v < vertex_count(); ++v)
      if (out_deg_[v] == 0 || in_deg_[v] == 0) return false;
    return !vertices_.empty();
  }

 private:
  void validate_and_index() {
    if (symbols_.empty()) throw Error("presentation: empty alphabet");
    if (vertices_.empty()) throw Error("presentation: empty vertex set");
    if (vertices_.size() > VertexSet::kCapacity)
      throw Error("presentation: more than 256 vertices unsupported");
    if (!std::is_sorted(symbols_.begin(), symbols_.end()) ||
        std::adjacent_find(symbols_.begin(), symbols_.end()) != symbols_.end())
      throw Error("presentation: alphabet must be sorted and duplicate-free");
    if (!std::is_sorted(vertices_.begin(), vertices_.end()) ||
        std::adjacent_find(vertices_.begin(), vertices_.end()) !=
            vertices_.end())
      throw Error("presentation: vertices must be sorted and duplicate-free");
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
      throw Error("presentation: duplicate edge (same src, dst, label)");
    for (const Edge& e : edges_) {
      if (e.src >= vertex_count() || e.dst >= vertex_count())
        throw Error("presentation: dangling reference to vertex");
      if (e.label >= symbol_count())
        throw Error("presentation: dangling reference to symbol");
    }
    pred_.assign(symbol_count(), std::vector<VertexSet>(vertex_count()));
    succ_.assign(symbol_count(), std::vector<VertexSet>(vertex_count()));
    out_deg_.assign(vertex_count(), 0);
    in_deg_.assign(vertex_count(), 0);
    for (const Edge& e : edges_) {
      pred_[e.label][e.dst].set(e.src);
      succ_[e.label][e.src].set(e.dst);
      ++out_deg_[e.src];
      ++in_deg_[e.dst];
    }
  }

  std::vector<std::string> symbols_;
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<VertexSet>> pred_;  // [label][target] -> sources
  std::vector<std::vector<VertexSet>> succ_;  // [label][source] -> targets
  std::vector<std::size_t> out_deg_, in_deg_;
};

// Convenience factory from name-based edge triples.
inline Presentation make_presentation(
    std::vector<std::string> symbols, std::vector<std::string> vertices,
    const std::vector<std::array<std::string, 3>>& edges_by_name) {
  std::sort(symbols.begin(), symbols.end());
  std::sort(vertices.begin(), vertices.end());
  auto find = [](const std::vector<std::string>& v, const std::string& s,
                 const char* what) {
    auto it = std::lower_bound(v.begin(), v.end(), s);
    if (it == v.end() || *it != s)
      throw Error(std::string("presentation: dangling reference to ") + what +
                  " '" + s + "'");
    return static_cast<uint32_t>(it - v.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(edges_by_name.size());
  for (const auto& [src, dst, label] : edges_by_name)
    edges.push_back(Edge{find(vertices, src, "vertex"),
                         find(vertices, dst, "vertex"),
                         find(symbols, label, "symbol")});
  return Presentation(std::move(symbols), std::move(vertices),
                      std::move(edges));
}

// Largest subgraph in which every vertex has in- and out-degree >= 1.
// Guarantees the shift map is a surjection with nonempty preimage sets.
inline Presentation essentialize(const Presentation& g) {
  std::vector<bool> alive(g.vertex_count(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::size_t> outd(g.vertex_count(), 0), ind(g.vertex_count(), 0);
    for (const Edge& e : g.edges()) {
      if (!alive[e.src] || !alive[e.dst]) continue;
      ++outd[e.src];
      ++ind[e.dst];
    }
    for (uint32_t v = 0; v < g.vertex_count(); ++v) {
      if (alive[v] && (outd[v] == 0 || ind[v] == 0)) {
        alive[v] = false;
        changed = true;
      }
    }
  }
  std::vector<std::string> vertices;
  std::vector<uint32_t> remap(g.vertex_count(), 0);
  for (uint32_t v = 0; v < g.vertex_count(); ++v) {
    if (alive[v]) {
      remap[v] = static_cast<uint32_t>(vertices.size());
      vertices.push_back(g.vertex_names()[v]);
    }
  }
  if (vertices.empty())
    throw Error("essentialize: presentation presents the empty shift");
  std::vector<Edge> edges;
  for (const Edge& e : g.edges())
    if (alive[e.src] && alive[e.dst])
      edges.push_back(Edge{remap[e.src], remap[e.dst], e.label});
  return Presentation(std::vector<std::string>(g.symbol_names()),
                      std::move(vertices), std::move(edges));
}

inline void require_essential(const Presentation& g, const char* op) {
  if (!g.is_essential())
    throw Error(std::string(op) + ": presentation must be essential");
}

// R(x): the set of vertices from which the ray x is readable. Computed by
// iterating the predecessor maps: the period tail stabilizes a fixed point
// of pre_v, the head is then applied right to left. Empty means x is not
// in the shift.
inline VertexSet readable_from(const Presentation& g, const EpPoint& x) {
  require_essential(g, "readable_from");
  for (std::size_t i = 0; i < x.head_size() + x.cycle_size(); ++i)
    if (x.at(i) >= g.symbol_count())
      throw Error("readable_from: point uses symbol outside the alphabet");
  auto pre_word = [&g](const std::vector<Symbol>& w, VertexSet t) {
    for (auto it = w.rbegin(); it != w.rend(); ++it) t = g.pre(*it, t);
    return t;
  };
  VertexSet t = g.full_set();
  while (true) {
    VertexSet next = pre_word(x.cycle(), t);
    if (next == t) break;
    t = next;
  }
  return pre_word(x.head(), t);
}

inline bool in_shift(const Presentation& g, const EpPoint& x) {
  return !readable_from(g, x).empty();
}

// N(x) = number of one-step shift preimages = #{ a : pre_a(R(x)) nonempty }.
inline int preimage_count(const Presentation& g, const EpPoint& x) {
  VertexSet r = readable_from(g, x);
  if (r.empty()) throw Error("preimage_count: point not in the shift");
  int n = 0;
  for (Symbol a = 0; a < g.symbol_count(); ++a)
    if (!g.pre(a, r).empty()) ++n;
  return n;
}

// ---- point literals -------------------------------------------------------

// "u(v)" means u * v^inf, e.g. "01(0)". Only defined for alphabets whose
// symbol names are single characters; recoded alphabets are internal and
// never parsed from text.
inline EpPoint parse_point(const Presentation& g, const std::string& text) {
  for (const auto& s : g.symbol_names())
    if (s.size() != 1)
      throw Error("parse_point: literal syntax needs single-character symbols");
  auto open = text.find('(');
  auto close = text.find(')');
  if (open == std::string::npos || close != text.size() - 1 || close < open + 2)
    throw Error("parse_point: expected literal of the form u(v), v nonempty");
  auto to_ids = [&](const std::string& part) {
    std::vector<Symbol> ids;
    for (char c : part) {
      auto id = g.symbol_id(std::string(1, c));
      if (!id) throw Error(std::string("parse_point: unknown symbol '") + c + "'");
      ids.push_back(*id);
    }
    return ids;
  };
  return EpPoint(to_ids(text.substr(0, open)),
                 to_ids(text.substr(open + 1, close - open - 1)));
}

inline std::string point_to_string(const Presentation& g, const EpPoint& x) {
  std::string out;
  for (Symbol s : x.head()) out += g.symbol_names()[s];
  out += '(';
  for (Symbol s : x.cycle()) out += g.symbol_names()[s];
  out += ')';
  return out;
}

// ---- potentials -----------------------------------------------------------

// Locally constant real function: either depth-k on label words or a
// function of the cover vertex (predecessor set).
struct Potential {
  enum class Kind { Label, CoverVertex };
  Kind kind = Kind::Label;
  int depth = 1;  // label kind only
  std::map<std::string, double> table;

  double norm_inf() const {
    double m = 0.0;
    for (const auto& [k, v] : table) m = std::max(m, std::abs(v));
    return m;
  }
  bool strictly_positive() const {
    for (const auto& [k, v] : table)
      if (!(v > 0.0)) return false;
    return !table.empty();
  }
  bool strictly_negative() const {
    for (const auto& [k, v] : table)
      if (!(v < 0.0)) return false;
    return !table.empty();
  }
};

inline double norm_inf(const Potential& f) { return f.norm_inf(); }

inline std::vector<std::vector<Symbol>> admissible_words(const Presentation& g,
                                                         int k) {
  require_essential(g, "admissible_words");
  if (k < 1) throw Error("admissible_words: k must be >= 1");
  // (word, endpoints) pairs, extended symbol by symbol
  std::vector<std::pair<std::vector<Symbol>, VertexSet>> frontier;
  for (Symbol a = 0; a < g.symbol_count(); ++a) {
    VertexSet t = g.step(a, g.full_set());
    if (!t.empty()) frontier.push_back({{a}, t});
  }
  for (int len = 1; len < k; ++len) {
    std::vector<std::pair<std::vector<Symbol>, VertexSet>> next;
    for (auto& [w, ends] : frontier) {
      for (Symbol a = 0; a < g.symbol_count(); ++a) {
        VertexSet t = g.step(a, ends);
        if (t.empty()) continue;
        auto w2 = w;
        w2.push_back(a);
        next.push_back({std::move(w2), t});
      }
    }
    frontier = std::move(next);
  }
  std::vector<std::vector<Symbol>> words;
  words.reserve(frontier.size());
  for (auto& [w, ends] : frontier) words.push_back(std::move(w));
  std::sort(words.begin(), words.end());
  return words;
}

inline std::string word_key(const Presentation& g,
                            const std::vector<Symbol>& w) {
  std::string key;
  for (Symbol s : w) key += g.symbol_names()[s];
  return key;
}

// Resolve a depth-1 label potential against an alphabet; errors if the
// table is not total.
inline std::vector<double> resolve_depth1(const Presentation& g,
                                          const Potential& f) {
  if (f.kind != Potential::Kind::Label)
    throw Error("resolve_depth1: expected a label potential");
  if (f.depth != 1)
    throw Error("resolve_depth1: potential depth mismatch (apply higher_block)");
  std::vector<bool> used(g.symbol_count(), false);
  for (const Edge& e : g.edges()) used[e.label] = true;
  std::vector<double> values(g.symbol_count(), 0.0);
  for (Symbol a = 0; a < g.symbol_count(); ++a) {
    auto it = f.table.find(g.symbol_names()[a]);
    if (it == f.table.end()) {
      if (!used[a]) continue;  // symbol labels no edge, value never read
      throw Error("potential: table missing value for symbol '" +
                  g.symbol_names()[a] + "'");
    }
    if (!std::isfinite(it->second))
      throw Error("potential: non-finite value for symbol '" +
                  g.symbol_names()[a] + "'");
    values[a] = it->second;
  }
  return values;
}

// ---- higher block recoding ------------------------------------------------

// Conjugate presentation whose symbols are the admissible k-words of g.
// Vertices are the length-k edge paths; the edge p -> p' (overlap by k-1
// edges) is labeled by the label word of p. Reduces depth-k potentials to
// depth 1.
struct HigherBlock {
  Presentation graph;
  // new symbol id -> original word (length k)
  std::vector<std::vector<Symbol>> words;
  int k = 1;
  bool identity = false;
};

inline HigherBlock higher_block(const Presentation& g, int k) {
  require_essential(g, "higher_block");
  if (k < 1) throw Error("higher_block: k must be >= 1");
  if (k == 1) {
    std::vector<std::vector<Symbol>> words;
    for (Symbol a = 0; a < g.symbol_count(); ++a) words.push_back({a});
    return HigherBlock{g, std::move(words), 1, true};
  }
  // enumerate length-k edge paths
  std::vector<std::vector<uint32_t>> paths;  // edge index sequences
  {
    std::vector<std::vector<uint32_t>> frontier;
    for (uint32_t e = 0; e < g.edges().size(); ++e) frontier.push_back({e});
    for (int len = 1; len < k; ++len) {
      std::vector<std::vector<uint32_t>> next;
      for (const auto& p : frontier) {
        uint32_t at = g.edges()[p.back()].dst;
        for (uint32_t e = 0; e < g.edges().size(); ++e) {
          if (g.edges()[e].src != at) continue;
          auto p2 = p;
          p2.push_back(e);
          next.push_back(std::move(p2));
        }
      }
      frontier = std::move(next);
    }
    paths = std::move(frontier);
    std::sort(paths.begin(), paths.end());
  }
  if (paths.empty()) throw Error("higher_block: no length-k paths");
  if (paths.size() > VertexSet::kCapacity)
    throw Error("higher_block: recoded presentation exceeds 256 vertices");

  auto word_of_path = [&g](const std::vector<uint32_t>& p) {
    std::vector<Symbol> w;
    w.reserve(p.size());
    for (uint32_t e : p) w.push_back(g.edges()[e].label);
    return w;
  };

  std::vector<std::vector<Symbol>> words;
  for (const auto& p : paths) words.push_back(word_of_path(p));
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());

  auto symbol_of_word = [&words](const std::vector<Symbol>& w) {
    auto it = std::lower_bound(words.begin(), words.end(), w);
    return static_cast<Symbol>(it - words.begin());
  };

  std::vector<std::string> sym_names;
  for (const auto& w : words) {
    std::string name;
    for (Symbol s : w) name += g.symbol_names()[s];
    sym_names.push_back(name);
  }
  // word-name order must agree with word order for id stability
  if (!std::is_sorted(sym_names.begin(), sym_names.end()) ||
      std::adjacent_find(sym_names.begin(), sym_names.end()) != sym_names.end())
    throw Error("higher_block: concatenated word names collide; rename symbols");

  std::vector<std::string> vert_names;
  char buf[32];
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::snprintf(buf, sizeof buf, "q%04u", static_cast<unsigned>(i));
    vert_names.emplace_back(buf);
  }
  auto path_id = [&paths](const std::vector<uint32_t>& p) {
    auto it = std::lower_bound(paths.begin(), paths.end(), p);
    return static_cast<uint32_t>(it - paths.begin());
  };

  std::vector<Edge> edges;
  for (const auto& p : paths) {
    uint32_t at = g.edges()[p.back()].dst;
    for (uint32_t e = 0; e < g.edges().size(); ++e) {
      if (g.edges()[e].src != at) continue;
      std::vector<uint32_t> q(p.begin() + 1, p.end());
      q.push_back(e);
      edges.push_back(
          Edge{path_id(p), path_id(q), symbol_of_word(word_of_path(p))});
    }
  }
  Presentation recoded(std::move(sym_names), std::move(vert_names),
                       std::move(edges));
  return HigherBlock{std::move(recoded), std::move(words), k, false};
}

// Sliding-block image of a point under the recoding.
inline EpPoint recode_point(const Presentation& g, const HigherBlock& hb,
                            const EpPoint& x) {
  if (hb.identity) return x;
  const int k = hb.k;
  auto symbol_at = [&](std::size_t n) {
    std::vector<Symbol> w;
    for (int i = 0; i < k; ++i) w.push_back(x.at(n + i));
    auto it = std::lower_bound(hb.words.begin(), hb.words.end(), w);
    if (it == hb.words.end() || *it != w)
      throw Error("recode_point: window '" + word_key(g, w) +
                  "' is not an admissible word");
    return static_cast<Symbol>(it - hb.words.begin());
  };
  std::vector<Symbol> head, cyc;
  for (std::size_t n = 0; n < x.head_size(); ++n) head.push_back(symbol_at(n));
  for (std::size_t n = x.head_size(); n < x.head_size() + x.cycle_size(); ++n)
    cyc.push_back(symbol_at(n));
  return EpPoint(std::move(head), std::move(cyc));
}

// First-letter projection, the inverse sliding block map.
inline EpPoint decode_point(const HigherBlock& hb, const EpPoint& y) {
  if (hb.identity) return y;
  auto first = [&hb](Symbol s) { return hb.words[s][0]; };
  return y.map<Symbol>(first);
}

// Depth-k label potential as a depth-1 potential on the recoded alphabet.
inline Potential recode_potential(const Presentation& g, const HigherBlock& hb,
                                  const Potential& f) {
  if (f.kind != Potential::Kind::Label)
    throw Error("recode_potential: expected a label potential");
  if (hb.identity) return f;
  if (f.depth != hb.k) throw Error("recode_potential: depth mismatch");
  Potential out;
  out.kind = Potential::Kind::Label;
  out.depth = 1;
  for (std::size_t s = 0; s < hb.words.size(); ++s) {
    std::string key = word_key(g, hb.words[s]);
    auto it = f.table.find(key);
    if (it == f.table.end())
      throw Error("potential: table missing value for word '" + key + "'");
    out.table[hb.graph.symbol_names()[s]] = it->second;
  }
  return out;
}

}  // namespace kmslab
