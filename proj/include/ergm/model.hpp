#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergm/config_space.hpp"
#include "ergm/motif.hpp"

namespace ergm {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Ferromagnetic ERGM definition: vertex count n and motif terms (G_i, beta_i)
/// with beta_i > 0.
struct ModelSpec {
  int n;
  std::vector<std::pair<MotifSpec, double>> terms;

  ModelSpec(int n_, std::vector<std::pair<MotifSpec, double>> ts)
      : n(n_), terms(std::move(ts)) {
    if (terms.empty() || terms.size() > 8)
      throw std::invalid_argument("ModelSpec: need 1..8 terms");
    for (auto& [g, beta] : terms) {
      if (!(beta > 0)) throw std::invalid_argument("ModelSpec: beta must be > 0");
      if (g.vertex_count > 5)
        throw std::invalid_argument("ModelSpec: motif vertex count must be <= 5");
      if (g.vertex_count > n)
        throw std::invalid_argument("ModelSpec: motif larger than n");
    }
  }

  int max_vertices() const {
    int a = 2;
    for (auto& [g, beta] : terms) a = std::max(a, g.vertex_count);
    return a;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "n=" << n;
    for (auto& [g, beta] : terms) {
      os << "; term=" << (g.name.empty() ? "?" : g.name) << ":";
      os << beta;
    }
    return os.str();
  }
};

/// Parses "n=<n>; term=<motif>:<beta>; term=...".
inline ModelSpec parse_model(const std::string& text) {
  int n = -1;
  std::vector<std::pair<MotifSpec, double>> terms;
  std::istringstream is(text);
  std::string field;
  while (std::getline(is, field, ';')) {
    auto first = field.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    auto last = field.find_last_not_of(" \t");
    field = field.substr(first, last - first + 1);
    if (field.rfind("n=", 0) == 0) {
      n = std::stoi(field.substr(2));
    } else if (field.rfind("term=", 0) == 0) {
      std::string body = field.substr(5);
      auto colon = body.rfind(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("parse_model: term needs <motif>:<beta>");
      terms.emplace_back(parse_motif(body.substr(0, colon)),
                         std::stod(body.substr(colon + 1)));
    } else {
      throw std::invalid_argument("parse_model: unknown field '" + field + "'");
    }
  }
  if (n < 0) throw std::invalid_argument("parse_model: missing n=");
  return ModelSpec(n, std::move(terms));
}

/// Phi(u) = e^u / (1 + e^u), evaluated in the stable branch.
inline double logistic(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  double e = std::exp(u);
  return e / (1.0 + e);
}

/// Phi'(u) = Phi(u)(1 - Phi(u)).
inline double logistic_prime(double u) {
  double p = logistic(u);
  return p * (1.0 - p);
}

inline double term_scale(const ModelSpec& m, int term) {
  return std::pow(static_cast<double>(m.n), m.terms[term].first.vertex_count - 2);
}

/// H(x) = sum_i beta_i N_{G_i}(x) / n^{|V_i|-2}.
inline double hamiltonian(const ModelSpec& m, const Configuration& x) {
  if (x.n() != m.n) throw std::invalid_argument("hamiltonian: n mismatch");
  double h = 0;
  for (std::size_t i = 0; i < m.terms.size(); ++i)
    h += m.terms[i].second * count_to_double(count_motif(x, m.terms[i].first)) /
         term_scale(m, static_cast<int>(i));
  return h;
}

/// First discrete derivative of H at edge e; independent of x_e.
inline double local_field(const ModelSpec& m, const Configuration& x,
                          const EdgePair& e) {
  if (x.n() != m.n) throw std::invalid_argument("local_field: n mismatch");
  double h = 0;
  for (std::size_t i = 0; i < m.terms.size(); ++i)
    h += m.terms[i].second *
         count_to_double(count_motif_pinned(x, m.terms[i].first, e)) /
         term_scale(m, static_cast<int>(i));
  return h;
}

/// Second discrete derivative; zero for e = f, symmetric in (e, f).
inline double second_derivative(const ModelSpec& m, const Configuration& x,
                                const EdgePair& e, const EdgePair& f) {
  if (x.n() != m.n) throw std::invalid_argument("second_derivative: n mismatch");
  if (e == f) return 0;
  double h = 0;
  for (std::size_t i = 0; i < m.terms.size(); ++i)
    h += m.terms[i].second *
         count_to_double(count_motif_double_pinned(x, m.terms[i].first, e, f)) /
         term_scale(m, static_cast<int>(i));
  return h;
}

/// Heat-bath probability of setting edge e to 1: Phi(dH_e(x)). At least 1/2
/// for every ferromagnetic model since pinned counts are nonnegative.
inline double update_probability(const ModelSpec& m, const Configuration& x,
                                 const EdgePair& e) {
  return logistic(local_field(m, x, e));
}

// --- exact-rational evaluation, oracle scale only (n <= 8) ---

namespace rational_mode {

inline void check_small(const ModelSpec& m) {
  if (m.n > 8)
    throw std::invalid_argument("rational mode is limited to n <= 8");
}

inline Rational to_rational(double b) {
  // every finite double is an exact dyadic rational
  Rational r(b);
  return r;
}

inline Rational hamiltonian(const ModelSpec& m, const Configuration& x) {
  check_small(m);
  Rational h = 0;
  for (auto& [g, beta] : m.terms) {
    BigInt scale = 1;
    for (int t = 0; t < g.vertex_count - 2; ++t) scale *= m.n;
    h += to_rational(beta) *
         Rational(BigInt(static_cast<long long>(count_motif(x, g))), scale);
  }
  return h;
}

inline Rational local_field(const ModelSpec& m, const Configuration& x,
                            const EdgePair& e) {
  check_small(m);
  Rational h = 0;
  for (auto& [g, beta] : m.terms) {
    BigInt scale = 1;
    for (int t = 0; t < g.vertex_count - 2; ++t) scale *= m.n;
    h += to_rational(beta) *
         Rational(BigInt(static_cast<long long>(count_motif_pinned(x, g, e))), scale);
  }
  return h;
}

}  // namespace rational_mode

}  // namespace ergm
