#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ergm/config_space.hpp"
#include "ergm/model.hpp"
#include "ergm/rng.hpp"

namespace ergm {

/// Time-indexed observables from a chain or coupling run.
struct RunTrace {
  std::vector<std::uint64_t> sample_times;
  std::map<std::string, std::vector<double>> observables;
  std::string model_text;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::optional<std::uint64_t> coalescence_step;

  void record(std::uint64_t t) { sample_times.push_back(t); }
  void push(const std::string& name, double v) { observables[name].push_back(v); }
};

struct ChainState {
  const ModelSpec* model;
  Configuration config;
  std::uint64_t t = 0;
};

/// One heat-bath update: uniform edge I, uniform threshold U, set
/// x_I <- [U < Phi(dH_I(x))]. Always consumes exactly two draws.
inline void glauber_step(const ModelSpec& m, Configuration& x, RngStream& rng) {
  std::size_t idx = rng.uniform_index(x.num_edges_total());
  double u = rng.uniform01();
  EdgePair e = edge_from_index(idx, x.n());
  x.set(e, u < update_probability(m, x, e));
}

inline void glauber_step(ChainState& s, RngStream& rng) {
  glauber_step(*s.model, s.config, rng);
  ++s.t;
}

/// One shared (I, U) applied to every configuration; preserves every pairwise
/// partial-order relation for ferromagnetic models.
inline void grand_coupled_step(const ModelSpec& m,
                               std::vector<Configuration*> states, RngStream& rng) {
  if (states.empty()) return;
  std::size_t idx = rng.uniform_index(states[0]->num_edges_total());
  double u = rng.uniform01();
  EdgePair e = edge_from_index(idx, states[0]->n());
  for (auto* x : states) {
    if (x->n() != m.n)
      throw std::invalid_argument("grand_coupled_step: mixed vertex counts");
    x->set(e, u < update_probability(m, *x, e));
  }
}

/// Builds an initial configuration from "empty", "full", "gnp(p)" or an
/// "n=<n>;<hex>" dump. gnp draws consume one uniform per edge.
inline Configuration make_init(const ModelSpec& m, const std::string& spec,
                               RngStream& rng) {
  if (spec == "empty") return Configuration(m.n);
  if (spec == "full") return Configuration::complete(m.n);
  if (spec.rfind("gnp(", 0) == 0 && spec.back() == ')') {
    double p = std::stod(spec.substr(4, spec.size() - 5));
    Configuration x(m.n);
    for (std::size_t idx = 0; idx < x.num_edges_total(); ++idx)
      x.set(idx, rng.uniform01() < p);
    return x;
  }
  if (spec.rfind("n=", 0) == 0) {
    Configuration x = Configuration::from_hex(spec);
    if (x.n() != m.n) throw std::invalid_argument("make_init: hex n mismatch");
    return x;
  }
  throw std::invalid_argument("make_init: bad init spec '" + spec + "'");
}

inline std::uint64_t default_burn_in(int n) {
  return static_cast<std::uint64_t>(20.0 * n * n * std::log(n));
}

inline std::uint64_t default_step_cap(int n) {
  return static_cast<std::uint64_t>(200.0 * n * n * std::log(n));
}

inline RunTrace run_chain(const ModelSpec& m, const std::string& init,
                          std::uint64_t steps, std::uint64_t sample_every,
                          std::uint64_t seed) {
  if (sample_every == 0) sample_every = 1;
  RngStream rng(seed);
  Configuration x = make_init(m, init, rng);
  RunTrace tr;
  tr.model_text = m.to_text();
  tr.seed = seed;
  tr.steps = steps;
  auto sample = [&](std::uint64_t t) {
    tr.record(t);
    tr.push("edge_count", static_cast<double>(x.edge_count()));
  };
  sample(0);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    glauber_step(m, x, rng);
    if (t % sample_every == 0) sample(t);
  }
  return tr;
}

/// Grand-coupled pair from the full and empty graphs; records the Hamming
/// distance trace and the first coalescence time if reached.
inline RunTrace pm_sandwich_run(const ModelSpec& m, std::uint64_t steps,
                                std::uint64_t sample_every, std::uint64_t seed) {
  if (sample_every == 0) sample_every = 1;
  RngStream rng(seed);
  Configuration lo(m.n);
  Configuration hi = Configuration::complete(m.n);
  RunTrace tr;
  tr.model_text = m.to_text();
  tr.seed = seed;
  tr.steps = steps;
  auto sample = [&](std::uint64_t t) {
    tr.record(t);
    tr.push("hamming", static_cast<double>(hamming_distance(lo, hi)));
  };
  sample(0);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    grand_coupled_step(m, {&lo, &hi}, rng);
    if (!tr.coalescence_step && lo == hi) tr.coalescence_step = t;
    if (t % sample_every == 0) sample(t);
  }
  return tr;
}

/// Runs replicated (full, empty) couplings in parallel and merges results in
/// stream order.
template <typename Fn>
inline void parallel_replicas(std::size_t replicas, int threads, Fn&& fn) {
  if (threads <= 1 || replicas <= 1) {
    for (std::size_t r = 0; r < replicas; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t per = (replicas + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    std::size_t lo = t * per, hi = std::min(replicas, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t r = lo; r < hi; ++r) fn(r);
    });
  }
  for (auto& th : pool) th.join();
}

struct TmixEstimate {
  std::uint64_t steps;
  bool capped;
};

/// Empirical epsilon-mixing bound: the time by which the fraction of
/// non-coalesced (full, empty) grand couplings falls below epsilon.
inline TmixEstimate estimate_tmix(const ModelSpec& m, double epsilon,
                                  std::size_t replicas, std::uint64_t seed,
                                  std::uint64_t step_cap = 0, int threads = 1) {
  if (!(epsilon > 0 && epsilon <= 1))
    throw std::invalid_argument("estimate_tmix: epsilon in (0, 1]");
  if (epsilon == 1.0) return {0, false};
  if (step_cap == 0) step_cap = default_step_cap(m.n);
  std::vector<std::uint64_t> times(replicas, step_cap);
  std::vector<char> hit(replicas, 0);
  parallel_replicas(replicas, threads, [&](std::size_t r) {
    RngStream rng(seed, r);
    Configuration lo(m.n);
    Configuration hi = Configuration::complete(m.n);
    for (std::uint64_t t = 1; t <= step_cap; ++t) {
      grand_coupled_step(m, {&lo, &hi}, rng);
      if (lo == hi) {
        times[r] = t;
        hit[r] = 1;
        break;
      }
    }
  });
  std::size_t allowed_late = static_cast<std::size_t>(epsilon * replicas);
  std::vector<std::uint64_t> sorted(times);
  std::sort(sorted.begin(), sorted.end());
  std::size_t rank = replicas - allowed_late;
  if (rank == 0) return {0, false};
  bool capped = false;
  for (std::size_t r = 0; r < replicas; ++r)
    if (!hit[r]) capped = true;
  return {sorted[rank - 1], capped};
}

/// Coupled ERGM / Erdos-Renyi evolution of Section-9 type: shared edge I and
/// threshold U, X-edge <- [U < Phi(dH_I(X))], Y-edge <- [U < p_star]. Sharing
/// U realizes the optimal coupling of the two Bernoulli updates. Records
/// d_H(X, Y) and the per-step field deviation |dH_I(X) - Psi(p_star)|.
inline RunTrace ergm_er_coupled_run(const ModelSpec& m, double p_star,
                                    std::uint64_t steps, std::uint64_t seed,
                                    const Configuration& x_init,
                                    const Configuration& y_init,
                                    std::uint64_t sample_every = 1) {
  if (!(p_star > 0 && p_star < 1))
    throw std::invalid_argument("ergm_er_coupled_run: p_star in (0, 1)");
  if (sample_every == 0) sample_every = 1;
  RngStream rng(seed);
  Configuration x = x_init, y = y_init;
  double psi_pstar = std::log(p_star / (1 - p_star));  // Phi(u)=p* at u=this
  RunTrace tr;
  tr.model_text = m.to_text();
  tr.seed = seed;
  tr.steps = steps;
  auto sample = [&](std::uint64_t t, double dev) {
    tr.record(t);
    tr.push("hamming", static_cast<double>(hamming_distance(x, y)));
    tr.push("field_dev", dev);
  };
  sample(0, 0.0);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    std::size_t idx = rng.uniform_index(x.num_edges_total());
    double u = rng.uniform01();
    EdgePair e = edge_from_index(idx, x.n());
    double field = local_field(m, x, e);
    x.set(e, u < logistic(field));
    y.set(e, u < p_star);
    if (!tr.coalescence_step && x == y) tr.coalescence_step = t;
    if (t % sample_every == 0) sample(t, std::abs(field - psi_pstar));
  }
  return tr;
}

/// Resamples edges 0..M-1 once each, in the frozen edge order, from their
/// conditional laws. One uniform per edge.
inline Configuration sequential_sweep(const ModelSpec& m, Configuration x,
                                      RngStream& rng) {
  for (std::size_t idx = 0; idx < x.num_edges_total(); ++idx) {
    EdgePair e = edge_from_index(idx, x.n());
    x.set(e, rng.uniform01() < update_probability(m, x, e));
  }
  return x;
}

struct SweepCoupling {
  Configuration x;
  Configuration y;
  std::size_t discrepancies;  // edges where the fresh updates disagreed
};

/// Coupled sweep against Bernoulli(p_star), sharing the uniform per edge.
/// Counts the discrepancies created at update time.
inline SweepCoupling sequential_sweep_coupled(const ModelSpec& m, Configuration x,
                                              Configuration y, double p_star,
                                              RngStream& rng) {
  std::size_t created = 0;
  for (std::size_t idx = 0; idx < x.num_edges_total(); ++idx) {
    EdgePair e = edge_from_index(idx, x.n());
    double u = rng.uniform01();
    bool bx = u < update_probability(m, x, e);
    bool by = u < p_star;
    x.set(e, bx);
    y.set(e, by);
    if (bx != by) ++created;
  }
  return {std::move(x), std::move(y), created};
}

}  // namespace ergm
