#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "ergm/config_space.hpp"

namespace ergm {

/// Subgraph counts are kept in 128-bit integers: labeled counts on K_n for
/// 5-vertex motifs at n = 4096 exceed 64 bits.
using Count = __int128;

inline double count_to_double(Count c) { return static_cast<double>(c); }

/// A small finite graph used as a Hamiltonian term. Vertices are [0, |V|).
struct MotifSpec {
  int vertex_count;
  std::vector<std::pair<int, int>> edges;  // each pair (a, b) with a < b
  std::string name;

  MotifSpec(int vc, std::vector<std::pair<int, int>> es, std::string nm = "")
      : vertex_count(vc), edges(std::move(es)), name(std::move(nm)) {
    validate();
  }

  int num_motif_edges() const { return static_cast<int>(edges.size()); }

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (auto& [u, v] : edges)
      if (u == a && v == b) return true;
    return false;
  }

private:
  void validate() {
    if (vertex_count < 2 || vertex_count > 6)
      throw std::invalid_argument("MotifSpec: vertex count must be in [2, 6]");
    std::vector<int> touched(vertex_count, 0);
    for (auto& e : edges) {
      if (e.first > e.second) std::swap(e.first, e.second);
      auto [a, b] = e;
      if (a < 0 || b >= vertex_count || a == b)
        throw std::invalid_argument("MotifSpec: bad edge");
      touched[a] = touched[b] = 1;
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
      throw std::invalid_argument("MotifSpec: duplicate edge");
    for (int v = 0; v < vertex_count; ++v)
      if (!touched[v]) throw std::invalid_argument("MotifSpec: isolated vertex");
    // connectivity (union-find is overkill at <= 6 vertices)
    std::vector<int> comp(vertex_count);
    std::iota(comp.begin(), comp.end(), 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (auto& [a, b] : edges)
        if (comp[a] != comp[b]) {
          int lo = std::min(comp[a], comp[b]);
          comp[a] = comp[b] = lo;
          changed = true;
        }
    }
    for (int v = 0; v < vertex_count; ++v)
      if (comp[v] != 0) throw std::invalid_argument("MotifSpec: disconnected");
  }
};

inline MotifSpec motif_edge() { return MotifSpec(2, {{0, 1}}, "edge"); }
inline MotifSpec motif_twostar() { return MotifSpec(3, {{0, 1}, {1, 2}}, "twostar"); }
inline MotifSpec motif_triangle() {
  return MotifSpec(3, {{0, 1}, {0, 2}, {1, 2}}, "triangle");
}
inline MotifSpec motif_complete(int k, std::string name) {
  std::vector<std::pair<int, int>> es;
  for (int j = 1; j < k; ++j)
    for (int i = 0; i < j; ++i) es.push_back({i, j});
  return MotifSpec(k, std::move(es), std::move(name));
}

/// Accepts the builtin aliases or "V=<k>;E=(a,b)(c,d)...".
inline MotifSpec parse_motif(const std::string& text) {
  if (text == "edge") return motif_edge();
  if (text == "twostar") return motif_twostar();
  if (text == "triangle") return motif_triangle();
  if (text == "k4") return motif_complete(4, "k4");
  if (text == "k5") return motif_complete(5, "k5");
  if (text.rfind("V=", 0) != 0)
    throw std::invalid_argument("parse_motif: unknown motif '" + text + "'");
  auto semi = text.find(";E=");
  if (semi == std::string::npos)
    throw std::invalid_argument("parse_motif: missing ;E= in '" + text + "'");
  int vc = std::stoi(text.substr(2, semi - 2));
  std::vector<std::pair<int, int>> es;
  std::size_t pos = semi + 3;
  while (pos < text.size()) {
    if (text[pos] != '(')
      throw std::invalid_argument("parse_motif: expected '(' in edge list");
    auto comma = text.find(',', pos);
    auto close = text.find(')', pos);
    if (comma == std::string::npos || close == std::string::npos || comma > close)
      throw std::invalid_argument("parse_motif: malformed edge");
    es.push_back({std::stoi(text.substr(pos + 1, comma - pos - 1)),
                  std::stoi(text.substr(comma + 1, close - comma - 1))});
    pos = close + 1;
  }
  return MotifSpec(vc, std::move(es), text);
}

namespace detail {

// Injective extension of a partial map psi: V(G) -> [n]. `forced` lists up to
// two graph edges treated as present regardless of x.
class MotifEnumerator {
public:
  MotifEnumerator(const Configuration& x, const MotifSpec& g,
                  std::vector<EdgePair> forced = {})
      : x_(x), g_(g), forced_(std::move(forced)) {}

  Count extend(std::vector<int>& psi, std::vector<char>& used) {
    int next = pick_unassigned(psi);
    if (next < 0) return 1;
    Count total = 0;
    for (int v = 0; v < x_.n(); ++v) {
      if (used[v]) continue;
      if (!compatible(psi, next, v)) continue;
      psi[next] = v;
      used[v] = 1;
      total += extend(psi, used);
      psi[next] = -1;
      used[v] = 0;
    }
    return total;
  }

  bool edge_present(int a, int b) const {
    for (auto& f : forced_)
      if ((f.i == std::min(a, b)) && (f.j == std::max(a, b))) return true;
    return x_.adjacent(a, b);
  }

private:
  // Prefer a motif vertex with an already-assigned neighbor so adjacency
  // pruning kicks in immediately.
  int pick_unassigned(const std::vector<int>& psi) const {
    int best = -1, best_score = -1;
    for (int u = 0; u < g_.vertex_count; ++u) {
      if (psi[u] >= 0) continue;
      int score = 0;
      for (auto& [a, b] : g_.edges) {
        if (a == u && psi[b] >= 0) ++score;
        if (b == u && psi[a] >= 0) ++score;
      }
      if (score > best_score) {
        best_score = score;
        best = u;
      }
    }
    return best;
  }

  bool compatible(const std::vector<int>& psi, int u, int v) const {
    for (auto& [a, b] : g_.edges) {
      int other = a == u ? b : (b == u ? a : -1);
      if (other < 0 || psi[other] < 0) continue;
      if (!edge_present(v, psi[other])) return false;
    }
    return true;
  }

  const Configuration& x_;
  const MotifSpec& g_;
  std::vector<EdgePair> forced_;
};

}  // namespace detail

/// Labeled (injective-embedding) subgraph count N_G(x).
inline Count count_motif_generic(const Configuration& x, const MotifSpec& g) {
  if (g.vertex_count > x.n())
    throw std::invalid_argument("count_motif: motif larger than n");
  detail::MotifEnumerator en(x, g);
  std::vector<int> psi(g.vertex_count, -1);
  std::vector<char> used(x.n(), 0);
  return en.extend(psi, used);
}

inline Count count_motif(const Configuration& x, const MotifSpec& g) {
  if (g.vertex_count > x.n())
    throw std::invalid_argument("count_motif: motif larger than n");
  if (g.name == "edge") return 2 * static_cast<Count>(x.edge_count());
  if (g.name == "twostar") {
    Count t = 0;
    for (int v = 0; v < x.n(); ++v) {
      Count d = x.degree(v);
      t += d * (d - 1);
    }
    return t;
  }
  if (g.name == "triangle") {
    Count t = 0;
    for (int j = 1; j < x.n(); ++j)
      for (int i = 0; i < j; ++i)
        if (x.adjacent(i, j)) t += x.common_neighbors(i, j);
    return 2 * t;  // each labeled orientation; 6 per unordered triangle
  }
  return count_motif_generic(x, g);
}

/// N_G(x,e): embeddings into x_{e+} with some motif edge mapped onto e.
/// Independent of the current state of e.
inline Count count_motif_pinned_generic(const Configuration& x, const MotifSpec& g,
                                        const EdgePair& e) {
  if (g.vertex_count > x.n())
    throw std::invalid_argument("count_motif_pinned: motif larger than n");
  detail::MotifEnumerator en(x, g, {e});
  Count total = 0;
  for (auto& [a, b] : g.edges) {
    for (int orient = 0; orient < 2; ++orient) {
      int u = orient ? b : a, v = orient ? a : b;
      std::vector<int> psi(g.vertex_count, -1);
      std::vector<char> used(x.n(), 0);
      psi[u] = e.i;
      psi[v] = e.j;
      used[e.i] = used[e.j] = 1;
      // remaining motif edges incident to u or v must already hold
      bool ok = true;
      for (auto& [p, q] : g.edges)
        if (psi[p] >= 0 && psi[q] >= 0 && !en.edge_present(psi[p], psi[q])) ok = false;
      if (ok) total += en.extend(psi, used);
    }
  }
  return total;
}

inline Count count_motif_pinned(const Configuration& x, const MotifSpec& g,
                                const EdgePair& e) {
  if (g.vertex_count > x.n())
    throw std::invalid_argument("count_motif_pinned: motif larger than n");
  if (g.name == "edge") return 2;
  if (g.name == "twostar") {
    // degrees in x_{e+}
    Count di = x.degree(e.i) + (x.adjacent(e.i, e.j) ? 0 : 1);
    Count dj = x.degree(e.j) + (x.adjacent(e.i, e.j) ? 0 : 1);
    return 2 * ((di - 1) + (dj - 1));
  }
  if (g.name == "triangle") return 6 * static_cast<Count>(x.common_neighbors(e.i, e.j));
  return count_motif_pinned_generic(x, g, e);
}

/// N_G(x,e,f): embeddings into x_{ef,+} with one motif edge on e and another
/// on f. Zero when e = f by convention; symmetric in (e, f).
inline Count count_motif_double_pinned_generic(const Configuration& x,
                                               const MotifSpec& g, const EdgePair& e,
                                               const EdgePair& f) {
  if (g.vertex_count > x.n())
    throw std::invalid_argument("count_motif_double_pinned: motif larger than n");
  if (e == f) return 0;
  detail::MotifEnumerator en(x, g, {e, f});
  Count total = 0;
  int ne = g.num_motif_edges();
  for (int m1 = 0; m1 < ne; ++m1)
    for (int o1 = 0; o1 < 2; ++o1)
      for (int m2 = 0; m2 < ne; ++m2) {
        if (m2 == m1) continue;
        for (int o2 = 0; o2 < 2; ++o2) {
          std::vector<int> psi(g.vertex_count, -1);
          std::vector<char> used(x.n(), 0);
          auto assign = [&](int u, int v) {
            if (psi[u] >= 0) return psi[u] == v;
            if (used[v]) return false;
            psi[u] = v;
            used[v] = 1;
            return true;
          };
          auto [a1, b1] = g.edges[m1];
          auto [a2, b2] = g.edges[m2];
          if (!assign(o1 ? b1 : a1, e.i)) continue;
          if (!assign(o1 ? a1 : b1, e.j)) continue;
          if (!assign(o2 ? b2 : a2, f.i)) continue;
          if (!assign(o2 ? a2 : b2, f.j)) continue;
          bool ok = true;
          for (auto& [p, q] : g.edges)
            if (psi[p] >= 0 && psi[q] >= 0 && !en.edge_present(psi[p], psi[q]))
              ok = false;
          if (ok) total += en.extend(psi, used);
        }
      }
  return total;
}

inline Count count_motif_double_pinned(const Configuration& x, const MotifSpec& g,
                                       const EdgePair& e, const EdgePair& f) {
  if (g.vertex_count > x.n())
    throw std::invalid_argument("count_motif_double_pinned: motif larger than n");
  if (e == f) return 0;
  if (g.name == "edge") return 0;  // a single motif edge cannot cover both
  if (g.name == "triangle") {
    if (!e.shares_vertex(f)) return 0;
    int shared = (e.i == f.i || e.i == f.j) ? e.i : e.j;
    int a = e.i == shared ? e.j : e.i;
    int b = f.i == shared ? f.j : f.i;
    if (a == b) return 0;
    bool third = x.adjacent(a, b) || EdgePair(a, b) == e || EdgePair(a, b) == f;
    return third ? 6 : 0;
  }
  return count_motif_double_pinned_generic(x, g, e, f);
}

namespace detail {
inline Count checked_mul(Count a, Count b) {
  if (a != 0 && b > (static_cast<Count>(1) << 120) / a)
    throw std::overflow_error("motif count overflow");
  return a * b;
}
}  // namespace detail

/// Closed form N_G(K_n, e) = 2|E| C(n-2, |V|-2) (|V|-2)!, exact integers.
inline Count complete_graph_pinned_count(const MotifSpec& g, int n) {
  if (g.vertex_count > n)
    throw std::invalid_argument("complete_graph_pinned_count: motif larger than n");
  Count r = 2 * static_cast<Count>(g.num_motif_edges());
  // C(n-2, k) * k! = (n-2)(n-3)...(n-1-k), the falling factorial
  for (int t = 0; t < g.vertex_count - 2; ++t)
    r = detail::checked_mul(r, static_cast<Count>(n - 2 - t));
  return r;
}

/// r_G(x,e) = (N_G(x,e) / (2|E| n^{|V|-2}))^{1/(|E|-1)}.
/// The edge motif (|E|=1) is defined as 1: its pinned count is always 2 and
/// carries no density information.
inline double normalized_pinned_count(const Configuration& x, const MotifSpec& g,
                                      const EdgePair& e) {
  int ne = g.num_motif_edges();
  if (ne == 1) return 1.0;
  double denom = 2.0 * ne * std::pow(static_cast<double>(x.n()), g.vertex_count - 2);
  double base = count_to_double(count_motif_pinned(x, g, e)) / denom;
  return std::pow(base, 1.0 / (ne - 1));
}

/// Connected motifs on at most `a` vertices with |E| >= 2, up to isomorphism.
/// Enumerated by brute force with canonical-form dedup (at most 5! permutations).
inline std::vector<MotifSpec> motif_catalog(int a) {
  if (a < 2 || a > 5)
    throw std::invalid_argument("motif_catalog: a must be in [2, 5]");
  std::vector<MotifSpec> out;
  for (int k = 3; k <= a; ++k) {
    int pairs = k * (k - 1) / 2;
    std::vector<std::pair<int, int>> pair_list;
    for (int j = 1; j < k; ++j)
      for (int i = 0; i < j; ++i) pair_list.push_back({i, j});
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> perms;
    do {
      perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<unsigned> seen;
    for (unsigned mask = 0; mask < (1u << pairs); ++mask) {
      if (std::popcount(mask) < 2) continue;
      std::vector<std::pair<int, int>> es;
      for (int b = 0; b < pairs; ++b)
        if ((mask >> b) & 1) es.push_back(pair_list[b]);
      // no isolated vertices and connected: let MotifSpec validate
      std::optional<MotifSpec> spec;
      try {
        spec.emplace(k, es);
      } catch (const std::invalid_argument&) {
        continue;
      }
      unsigned canon = ~0u;
      for (auto& p : perms) {
        unsigned m2 = 0;
        for (auto& [u, v] : spec->edges) {
          int pu = p[u], pv = p[v];
          if (pu > pv) std::swap(pu, pv);
          for (int b = 0; b < pairs; ++b)
            if (pair_list[b] == std::pair<int, int>(pu, pv)) m2 |= 1u << b;
        }
        canon = std::min(canon, m2);
      }
      if (std::find(seen.begin(), seen.end(), canon) == seen.end()) {
        seen.push_back(canon);
        out.push_back(*spec);
      }
    }
  }
  // name the shapes the fast paths know
  for (auto& g : out) {
    if (g.vertex_count == 3 && g.edges.size() == 2) g.name = "twostar";
    if (g.vertex_count == 3 && g.edges.size() == 3) g.name = "triangle";
  }
  return out;
}

struct TDeltaResult {
  bool member;
  double r_min;
  double r_max;
};

/// Membership in T_delta: every normalized pinned count over the catalog of
/// motifs with <= a vertices and every edge lies within delta of p_star.
inline TDeltaResult t_delta_membership(const Configuration& x, int a, double p_star,
                                       double delta) {
  if (a < 2 || a > 5) throw std::invalid_argument("t_delta_membership: a in [2, 5]");
  if (!(p_star > 0 && p_star < 1 && delta > 0))
    throw std::invalid_argument("t_delta_membership: bad p_star/delta");
  auto catalog = motif_catalog(a);
  double rmin = 1e300, rmax = -1e300;
  std::size_t m = x.num_edges_total();
  for (auto& g : catalog) {
    for (std::size_t idx = 0; idx < m; ++idx) {
      double r = normalized_pinned_count(x, g, edge_from_index(idx, x.n()));
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
  }
  bool member = (p_star - delta < rmin) && (rmax < p_star + delta);
  return {member, rmin, rmax};
}

}  // namespace ergm
