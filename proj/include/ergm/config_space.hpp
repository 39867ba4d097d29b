#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ergm {

constexpr int kMaxVertices = 4096;

/// Unordered vertex pair with the canonical ordering i < j.
struct EdgePair {
  int i;
  int j;

  EdgePair(int a, int b) : i(a < b ? a : b), j(a < b ? b : a) {
    if (a == b || a < 0 || b < 0)
      throw std::invalid_argument("EdgePair: need two distinct nonnegative vertices");
  }

  bool operator==(const EdgePair& o) const { return i == o.i && j == o.j; }
  bool shares_vertex(const EdgePair& o) const {
    return i == o.i || i == o.j || j == o.i || j == o.j;
  }
};

inline std::size_t num_edges(int n) {
  return static_cast<std::size_t>(n) * (n - 1) / 2;
}

/// Column-major pair order (j outer, i inner): index = j(j-1)/2 + i.
/// This order is frozen; CSV output and seed reproducibility depend on it.
inline std::size_t edge_index(const EdgePair& e, int n) {
  if (e.j >= n) throw std::invalid_argument("edge_index: vertex out of range");
  return static_cast<std::size_t>(e.j) * (e.j - 1) / 2 + e.i;
}

inline EdgePair edge_from_index(std::size_t idx, int n) {
  if (idx >= num_edges(n)) throw std::invalid_argument("edge_from_index: out of range");
  int j = 1;
  while (static_cast<std::size_t>(j) * (j + 1) / 2 <= idx) ++j;
  int i = static_cast<int>(idx - static_cast<std::size_t>(j) * (j - 1) / 2);
  return EdgePair(i, j);
}

/// One graph state on [n]: a bit vector over the M = n(n-1)/2 unordered
/// pairs, kept consistent with per-vertex adjacency rows. The rows give the
/// motif fast paths O(n/64) neighbor intersections.
class Configuration {
public:
  explicit Configuration(int n) : n_(n), m_(num_edges(n)) {
    if (n < 2 || n > kMaxVertices)
      throw std::invalid_argument("Configuration: n out of [2, 4096]");
    bits_.assign((m_ + 63) / 64, 0);
    row_words_ = (static_cast<std::size_t>(n) + 63) / 64;
    adj_.assign(row_words_ * n, 0);
  }

  static Configuration complete(int n) {
    Configuration x(n);
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i) x.set(EdgePair(i, j), true);
    return x;
  }

  int n() const { return n_; }
  std::size_t num_edges_total() const { return m_; }

  bool get(std::size_t idx) const { return (bits_[idx >> 6] >> (idx & 63)) & 1; }
  bool get(const EdgePair& e) const { return get(edge_index(e, n_)); }

  void set(const EdgePair& e, bool v) {
    std::size_t idx = edge_index(e, n_);
    std::uint64_t mask = 1ull << (idx & 63);
    bool cur = bits_[idx >> 6] & mask;
    if (cur == v) return;
    bits_[idx >> 6] ^= mask;
    adj_word(e.i, e.j) ^= 1ull << (e.j & 63);
    adj_word(e.j, e.i) ^= 1ull << (e.i & 63);
  }
  void set(std::size_t idx, bool v) { set(edge_from_index(idx, n_), v); }
  void flip(const EdgePair& e) { set(e, !get(e)); }

  int degree(int v) const {
    int d = 0;
    for (std::size_t w = 0; w < row_words_; ++w)
      d += std::popcount(adj_[row_words_ * v + w]);
    return d;
  }

  int common_neighbors(int u, int v) const {
    int c = 0;
    for (std::size_t w = 0; w < row_words_; ++w)
      c += std::popcount(adj_[row_words_ * u + w] & adj_[row_words_ * v + w]);
    return c;
  }

  bool adjacent(int u, int v) const {
    return (adj_[row_words_ * u + (v >> 6)] >> (v & 63)) & 1;
  }

  std::size_t edge_count() const {
    std::size_t k = 0;
    for (auto w : bits_) k += std::popcount(w);
    return k;
  }

  const std::vector<std::uint64_t>& words() const { return bits_; }

  bool operator==(const Configuration& o) const {
    return n_ == o.n_ && bits_ == o.bits_;
  }

  /// "n=<n>;<hex>" with least-significant bit = edge index 0.
  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s = "n=" + std::to_string(n_) + ";";
    std::size_t nibbles = (m_ + 3) / 4;
    for (std::size_t k = nibbles; k-- > 0;) {
      unsigned v = (bits_[(4 * k) >> 6] >> ((4 * k) & 63)) & 0xf;
      s += digits[v];
    }
    return s;
  }

  static Configuration from_hex(const std::string& s) {
    auto semi = s.find(';');
    if (s.rfind("n=", 0) != 0 || semi == std::string::npos)
      throw std::invalid_argument("Configuration::from_hex: bad prefix");
    int n = std::stoi(s.substr(2, semi - 2));
    Configuration x(n);
    std::string hex = s.substr(semi + 1);
    std::size_t nib = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, ++nib) {
      char c = *it;
      unsigned v = c >= 'a' ? c - 'a' + 10 : c - '0';
      for (int b = 0; b < 4; ++b)
        if ((v >> b) & 1) {
          std::size_t idx = 4 * nib + b;
          if (idx < x.m_) x.set(idx, true);
        }
    }
    return x;
  }

private:
  std::uint64_t& adj_word(int u, int v) { return adj_[row_words_ * u + (v >> 6)]; }

  int n_;
  std::size_t m_;
  std::size_t row_words_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> adj_;
};

inline void check_same_n(const Configuration& x, const Configuration& y) {
  if (x.n() != y.n())
    throw std::invalid_argument("configurations have different vertex counts");
}

inline std::size_t hamming_distance(const Configuration& x, const Configuration& y) {
  check_same_n(x, y);
  std::size_t d = 0;
  for (std::size_t w = 0; w < x.words().size(); ++w)
    d += std::popcount(x.words()[w] ^ y.words()[w]);
  return d;
}

inline bool partial_order_leq(const Configuration& x, const Configuration& y) {
  check_same_n(x, y);
  for (std::size_t w = 0; w < x.words().size(); ++w)
    if (x.words()[w] & ~y.words()[w]) return false;
  return true;
}

inline std::pair<Configuration, Configuration> meet_join(const Configuration& x,
                                                         const Configuration& y) {
  check_same_n(x, y);
  Configuration lo(x.n()), hi(x.n());
  for (std::size_t idx = 0; idx < x.num_edges_total(); ++idx) {
    bool a = x.get(idx), b = y.get(idx);
    if (a && b) lo.set(idx, true);
    if (a || b) hi.set(idx, true);
  }
  return {lo, hi};
}

}  // namespace ergm
