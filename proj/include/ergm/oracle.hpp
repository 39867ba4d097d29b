#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ergm/dynamics.hpp"
#include "ergm/model.hpp"

namespace ergm {

/// Full enumeration of the Gibbs measure at tiny n. Configuration index
/// bit i = edge index i, so indices and hex dumps agree.
struct ExactGibbs {
  ModelSpec model;
  std::size_t m_edges;
  std::vector<double> table;  // probability per configuration index
  double log_z;
  double free_energy;  // log_z / n^2

  Configuration config_at(std::uint64_t index) const {
    Configuration x(model.n);
    for (std::size_t b = 0; b < m_edges; ++b)
      if ((index >> b) & 1) x.set(b, true);
    return x;
  }

  static std::uint64_t index_of(const Configuration& x) {
    return x.words()[0];
  }
};

inline ExactGibbs enumerate_gibbs(const ModelSpec& m) {
  if (m.n > 7)
    throw std::invalid_argument("enumerate_gibbs: n must be <= 7 (2^M states)");
  std::size_t me = num_edges(m.n);
  std::uint64_t total = 1ull << me;

  // Gray-code walk: one edge flip per state, H updated by the local field.
  std::vector<double> logw(total);
  Configuration x(m.n);
  double h = 0;
  logw[0] = 0;
  std::uint64_t prev_gray = 0;
  for (std::uint64_t k = 1; k < total; ++k) {
    std::uint64_t gray = k ^ (k >> 1);
    int bit = std::countr_zero(prev_gray ^ gray);
    EdgePair e = edge_from_index(bit, m.n);
    double field = local_field(m, x, e);
    bool now_present = (gray >> bit) & 1;
    h += now_present ? field : -field;
    x.set(e, now_present);
    logw[gray] = h;
    prev_gray = gray;
  }

  double max_lw = logw[0];
  for (double v : logw) max_lw = std::max(max_lw, v);
  double sum = 0;
  for (double v : logw) sum += std::exp(v - max_lw);
  double log_z = max_lw + std::log(sum);

  ExactGibbs g{m, me, std::vector<double>(total), log_z,
               log_z / (static_cast<double>(m.n) * m.n)};
  for (std::uint64_t i = 0; i < total; ++i)
    g.table[i] = std::exp(logw[i] - log_z);
  return g;
}

/// Exact joint probability P(X_{e1}=v1, ..., X_{ek}=vk).
inline double exact_marginal(const ExactGibbs& g, const std::vector<EdgePair>& edges,
                             const std::vector<int>& values) {
  if (edges.size() != values.size())
    throw std::invalid_argument("exact_marginal: edges/values length mismatch");
  if (edges.empty()) return 1.0;
  double p = 0;
  for (std::uint64_t i = 0; i < g.table.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      std::size_t idx = edge_index(edges[k], g.model.n);
      if (static_cast<int>((i >> idx) & 1) != values[k]) match = false;
    }
    if (match) p += g.table[i];
  }
  return p;
}

/// E[prod_k (X_{e_k} - E X_{e_k})] from the exact table.
inline double exact_k_correlation(const ExactGibbs& g,
                                  const std::vector<EdgePair>& edges) {
  std::vector<double> mean(edges.size(), 0);
  std::vector<std::size_t> idx(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    idx[k] = edge_index(edges[k], g.model.n);
    mean[k] = exact_marginal(g, {edges[k]}, {1});
  }
  double acc = 0;
  for (std::uint64_t i = 0; i < g.table.size(); ++i) {
    double prod = 1;
    for (std::size_t k = 0; k < edges.size(); ++k)
      prod *= static_cast<double>((i >> idx[k]) & 1) - mean[k];
    acc += prod * g.table[i];
  }
  return acc;
}

/// Heat-bath flip rate c(x, e) = P(x, x^e).
inline double flip_rate(const ModelSpec& m, const Configuration& x,
                        const EdgePair& e) {
  double p1 = update_probability(m, x, e);
  return x.get(e) ? 1.0 - p1 : p1;
}

/// Max over (x, e) of |pi(x) P(x, x^e) - pi(x^e) P(x^e, x)| with the 1/M
/// edge-selection factor. Accepts an optional fault injection on one rate
/// (used by the detector-sensitivity test).
inline double detailed_balance_check(
    const ExactGibbs& g,
    std::function<double(std::uint64_t, std::size_t, double)> perturb = nullptr) {
  double worst = 0;
  double inv_m = 1.0 / static_cast<double>(g.m_edges);
  for (std::uint64_t i = 0; i < g.table.size(); ++i) {
    Configuration x = g.config_at(i);
    for (std::size_t b = 0; b < g.m_edges; ++b) {
      EdgePair e = edge_from_index(b, g.model.n);
      double rate_fwd = flip_rate(g.model, x, e);
      if (perturb) rate_fwd = perturb(i, b, rate_fwd);
      Configuration y = x;
      y.flip(e);
      double rate_bwd = flip_rate(g.model, y, e);
      std::uint64_t j = i ^ (1ull << b);
      double v = std::abs(g.table[i] * inv_m * rate_fwd -
                          g.table[j] * inv_m * rate_bwd);
      worst = std::max(worst, v);
    }
  }
  return worst;
}

/// Detailed balance in exact-rational arithmetic. With heat-bath rates the
/// balance identity pi(x)P(x,x^e) = pi(x^e)P(x^e,x) reduces algebraically to
/// H(x_{e+}) - H(x_{e-}) = dH_e(x); that residual is what is maximized here,
/// as an exact rational, so a return of zero certifies balance exactly.
inline Rational detailed_balance_check_rational(const ModelSpec& m) {
  rational_mode::check_small(m);
  if (m.n > 5)
    throw std::invalid_argument("rational detailed balance: n <= 5");
  std::size_t me = num_edges(m.n);
  Rational worst = 0;
  for (std::uint64_t i = 0; i < (1ull << me); ++i) {
    Configuration x(m.n);
    for (std::size_t b = 0; b < me; ++b)
      if ((i >> b) & 1) x.set(b, true);
    for (std::size_t b = 0; b < me; ++b) {
      EdgePair e = edge_from_index(b, m.n);
      Configuration plus = x, minus = x;
      plus.set(e, true);
      minus.set(e, false);
      Rational lhs = rational_mode::hamiltonian(m, plus) -
                     rational_mode::hamiltonian(m, minus);
      Rational rhs = rational_mode::local_field(m, x, e);
      Rational v = lhs - rhs;
      if (v < 0) v = -v;
      if (v > worst) worst = v;
    }
  }
  return worst;
}

struct SpectralReport {
  double gap;
  std::uint64_t iterations;
  double residual;
};

/// 1 - lambda_2 of the heat-bath kernel by deflated power iteration on the
/// pi-symmetrized kernel. The chain is reversible, so the spectrum is real
/// and the symmetrization sqrt(pi_x/pi_y) P(x,y) is symmetric.
inline SpectralReport exact_spectral_gap(const ExactGibbs& g, double rel_tol = 1e-8,
                                         std::uint64_t iter_cap = 2000000) {
  if (g.model.n > 6)
    throw std::invalid_argument("exact_spectral_gap: n must be <= 6");
  std::uint64_t total = g.table.size();
  std::size_t me = g.m_edges;
  double inv_m = 1.0 / static_cast<double>(me);

  // Precompute p1 = Phi(field) per (state, edge); the kernel and its
  // transpose actions come from these.
  std::vector<double> p1(total * me);
  for (std::uint64_t i = 0; i < total; ++i) {
    Configuration x = g.config_at(i);
    for (std::size_t b = 0; b < me; ++b)
      p1[i * me + b] = update_probability(g.model, x, edge_from_index(b, g.model.n));
  }
  std::vector<double> sqrt_pi(total);
  for (std::uint64_t i = 0; i < total; ++i) sqrt_pi[i] = std::sqrt(g.table[i]);

  // y = S v where S = D^{1/2} P D^{-1/2}
  auto apply = [&](const std::vector<double>& v, std::vector<double>& y) {
    for (std::uint64_t i = 0; i < total; ++i) {
      double diag = 0;
      double acc = 0;
      for (std::size_t b = 0; b < me; ++b) {
        bool present = (i >> b) & 1;
        double set1 = p1[i * me + b];
        double move = present ? (1.0 - set1) : set1;  // prob of flipping b
        double stay = 1.0 - move;
        diag += inv_m * stay;
        std::uint64_t j = i ^ (1ull << b);
        acc += inv_m * move * (sqrt_pi[i] / sqrt_pi[j]) * v[j];
      }
      y[i] = diag * v[i] + acc;
    }
  };

  auto deflate = [&](std::vector<double>& v) {
    double dot = 0;
    for (std::uint64_t i = 0; i < total; ++i) dot += v[i] * sqrt_pi[i];
    for (std::uint64_t i = 0; i < total; ++i) v[i] -= dot * sqrt_pi[i];
  };

  // start vector: deterministic, orthogonal to nothing in particular
  std::vector<double> v(total), y(total);
  for (std::uint64_t i = 0; i < total; ++i)
    v[i] = 1.0 + 0.37 * std::sin(static_cast<double>(i) + 0.5);
  deflate(v);

  auto norm = [&](const std::vector<double>& w) {
    double s = 0;
    for (double z : w) s += z * z;
    return std::sqrt(s);
  };
  double nv = norm(v);
  for (auto& z : v) z /= nv;

  double lambda = 0, prev = 2;
  std::uint64_t it = 0;
  double residual = 1;
  for (; it < iter_cap; ++it) {
    apply(v, y);
    deflate(y);
    // shift to (S+I)/2 so the dominant eigenvalue is the top of the spectrum
    for (std::uint64_t i = 0; i < total; ++i) y[i] = 0.5 * (y[i] + v[i]);
    double ny = norm(y);
    double mu = 0;
    for (std::uint64_t i = 0; i < total; ++i) mu += v[i] * y[i];
    lambda = 2.0 * mu - 1.0;  // undo the shift
    residual = 0;
    for (std::uint64_t i = 0; i < total; ++i)
      residual = std::max(residual, std::abs(y[i] - mu * v[i]));
    for (std::uint64_t i = 0; i < total; ++i) v[i] = y[i] / ny;
    if (std::abs(lambda - prev) < rel_tol * std::max(1e-30, std::abs(lambda)) &&
        residual < 1e-10) {
      ++it;
      break;
    }
    prev = lambda;
  }
  if (it >= iter_cap)
    throw std::runtime_error("exact_spectral_gap: no convergence, residual " +
                             std::to_string(residual));
  return {1.0 - lambda, it, residual};
}

/// Dirichlet form E(f, f) = (1/M) sum_x sum_e c(x,e) (f(x^e)-f(x))^2 pi(x).
inline double dirichlet_form(const ExactGibbs& g, const std::vector<double>& f) {
  if (f.size() != g.table.size())
    throw std::invalid_argument("dirichlet_form: table size mismatch");
  double acc = 0;
  double inv_m = 1.0 / static_cast<double>(g.m_edges);
  for (std::uint64_t i = 0; i < g.table.size(); ++i) {
    Configuration x = g.config_at(i);
    for (std::size_t b = 0; b < g.m_edges; ++b) {
      EdgePair e = edge_from_index(b, g.model.n);
      double d = f[i ^ (1ull << b)] - f[i];
      acc += inv_m * flip_rate(g.model, x, e) * d * d * g.table[i];
    }
  }
  return acc;
}

inline double gibbs_variance(const ExactGibbs& g, const std::vector<double>& f) {
  double mean = 0;
  for (std::uint64_t i = 0; i < g.table.size(); ++i) mean += f[i] * g.table[i];
  double var = 0;
  for (std::uint64_t i = 0; i < g.table.size(); ++i)
    var += (f[i] - mean) * (f[i] - mean) * g.table[i];
  return var;
}

}  // namespace ergm
