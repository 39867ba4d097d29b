#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergm/dynamics.hpp"
#include "ergm/phase.hpp"

namespace ergm {

// --- small statistics helpers ---

inline double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

inline double variance_of(const std::vector<double>& v) {
  double m = mean_of(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
};

inline LinearFit linear_fit(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw std::invalid_argument("linear_fit: need >= 3 points");
  double mx = mean_of(xs), my = mean_of(ys);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  double slope = sxy / sxx;
  double r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return {slope, my - slope * mx, r2};
}

struct ConfidenceInterval {
  double estimate;
  double lo;
  double hi;
};

/// Bootstrap percentile CI (default 1000 resamples) for a statistic of a
/// sample index set. `stat` maps a resampled index list to a value.
template <typename Stat>
inline ConfidenceInterval bootstrap_ci(std::size_t sample_count, Stat&& stat,
                                       std::uint64_t seed, int resamples = 1000,
                                       double level = 0.95) {
  std::vector<std::size_t> ident(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i) ident[i] = i;
  double est = stat(ident);
  RngStream rng(seed, 0xb007);
  std::vector<double> vals(resamples);
  std::vector<std::size_t> idx(sample_count);
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < sample_count; ++i)
      idx[i] = rng.uniform_index(sample_count);
    vals[b] = stat(idx);
  }
  std::sort(vals.begin(), vals.end());
  double a = (1.0 - level) / 2;
  auto pick = [&](double q) {
    double pos = q * (resamples - 1);
    return vals[static_cast<std::size_t>(pos + 0.5)];
  };
  return {est, pick(a), pick(1.0 - a)};
}

// --- sample banks ---

struct SampleBank {
  ModelSpec model;
  std::vector<Configuration> samples;
  std::uint64_t burn_in;
  std::uint64_t thinning;
  std::uint64_t seed;
  std::size_t replicas;
  Phase classification;
  bool phase_warning;  // set unless the model classified Subcritical
  double p_star;       // NaN unless Subcritical
};

/// Stationary samples: `replicas` independent streams, each burned in from
/// the full graph then thinned. Deterministic merge in stream order.
inline SampleBank draw_bank(const ModelSpec& m, std::size_t count,
                            std::uint64_t burn_in, std::uint64_t thinning,
                            std::uint64_t seed, std::size_t replicas = 8,
                            int threads = 1) {
  if (count < 1) throw std::invalid_argument("draw_bank: count >= 1");
  if (thinning < 1) throw std::invalid_argument("draw_bank: thinning >= 1");
  replicas = std::min(replicas, count);
  PhaseReport rep = classify(m);

  std::vector<std::vector<Configuration>> per(replicas);
  parallel_replicas(replicas, threads, [&](std::size_t r) {
    std::size_t quota = count / replicas + (r < count % replicas ? 1 : 0);
    RngStream rng(seed, r);
    Configuration x = Configuration::complete(m.n);
    for (std::uint64_t t = 0; t < burn_in; ++t) glauber_step(m, x, rng);
    per[r].reserve(quota);
    for (std::size_t s = 0; s < quota; ++s) {
      for (std::uint64_t t = 0; t < thinning; ++t) glauber_step(m, x, rng);
      per[r].push_back(x);
    }
  });

  SampleBank bank{m,       {},       burn_in,
                  thinning, seed,    replicas,
                  rep.classification,
                  rep.classification != Phase::Subcritical,
                  rep.p_star};
  bank.samples.reserve(count);
  for (auto& chunk : per)
    for (auto& x : chunk) bank.samples.push_back(std::move(x));
  return bank;
}

// --- Lipschitz functions and concentration ---

struct LipschitzVector {
  std::vector<double> v;
  double norm1;
  double norm_inf;

  explicit LipschitzVector(std::vector<double> vals) : v(std::move(vals)) {
    norm1 = 0;
    norm_inf = 0;
    for (double x : v) {
      if (x < 0) throw std::invalid_argument("LipschitzVector: entries >= 0");
      norm1 += x;
      norm_inf = std::max(norm_inf, x);
    }
  }

  static LipschitzVector ones(std::size_t m) {
    return LipschitzVector(std::vector<double>(m, 1.0));
  }
};

struct TailTable {
  std::vector<double> t_grid;
  std::vector<double> tail_prob;  // P(|f - mean| > t)
  double fitted_c;                // from log p = a - c t^2/(|v|_1 |v|_inf)
  double r_squared;
  double f_mean;
  double f_variance;
  double var_over_m;  // Var(f) / M, the Lipschitz-sum variance report
};

inline TailTable concentration_tails(const SampleBank& bank,
                                     const LipschitzVector& lip) {
  if (lip.norm1 == 0)
    throw std::invalid_argument("concentration_tails: degenerate v");
  std::size_t me = num_edges(bank.model.n);
  if (lip.v.size() != me)
    throw std::invalid_argument("concentration_tails: v length != M");

  std::vector<double> f(bank.samples.size());
  for (std::size_t s = 0; s < bank.samples.size(); ++s) {
    double acc = 0;
    for (std::size_t idx = 0; idx < me; ++idx)
      if (bank.samples[s].get(idx)) acc += lip.v[idx];
    f[s] = acc;
  }
  double mu = mean_of(f), var = variance_of(f);
  double sd = std::sqrt(var);

  TailTable out;
  out.f_mean = mu;
  out.f_variance = var;
  out.var_over_m = var / static_cast<double>(me);

  // t-grid in units of sd; keep points with enough tail hits for a stable log
  std::vector<double> xs, ys;
  for (double mult = 0.25; mult <= 3.0; mult += 0.25) {
    double t = mult * sd;
    std::size_t hits = 0;
    for (double fv : f)
      if (std::abs(fv - mu) > t) ++hits;
    double p = static_cast<double>(hits) / f.size();
    out.t_grid.push_back(t);
    out.tail_prob.push_back(p);
    if (hits >= 10 && p < 1.0) {
      xs.push_back(t * t / (lip.norm1 * lip.norm_inf));
      ys.push_back(std::log(p));
    }
  }
  if (xs.size() >= 3) {
    LinearFit fit = linear_fit(xs, ys);
    out.fitted_c = -fit.slope;
    out.r_squared = fit.r_squared;
  } else {
    out.fitted_c = std::nan("");
    out.r_squared = std::nan("");
  }
  return out;
}

// --- CLT over vertex-disjoint edges ---

struct CltReport {
  std::vector<double> standardized;  // empirically centered/scaled S_m
  double ks_distance;
  double skewness;
  double excess_kurtosis;
  double numerator_variance_per_edge;  // Var(sum)/m, to compare with p*(1-p*)
};

/// Deterministic matching {(0,1), (2,3), ...} keeps the selection
/// reproducible; exchangeability makes the particular choice irrelevant.
inline std::vector<EdgePair> disjoint_matching(int n, int m_edges) {
  if (2 * m_edges > n)
    throw std::invalid_argument("disjoint_matching: not enough vertices");
  std::vector<EdgePair> out;
  for (int k = 0; k < m_edges; ++k) out.push_back(EdgePair(2 * k, 2 * k + 1));
  return out;
}

inline CltReport clt_sample(const SampleBank& bank, int m_edges) {
  auto edges = disjoint_matching(bank.model.n, m_edges);
  std::vector<double> sums(bank.samples.size());
  for (std::size_t s = 0; s < bank.samples.size(); ++s) {
    int k = 0;
    for (auto& e : edges)
      if (bank.samples[s].get(e)) ++k;
    sums[s] = k;
  }
  double mu = mean_of(sums), var = variance_of(sums);
  double sd = std::sqrt(var);

  CltReport rep;
  rep.numerator_variance_per_edge = var / m_edges;
  rep.standardized.resize(sums.size());
  for (std::size_t s = 0; s < sums.size(); ++s)
    rep.standardized[s] = (sums[s] - mu) / sd;

  // S_m is integer-valued, so the empirical CDF is compared to the normal
  // at the lattice cell boundaries (continuity correction); the raw sup
  // distance would be dominated by the lattice jump, not by non-normality.
  std::vector<int> counts(m_edges + 1, 0);
  for (double sv : sums) ++counts[static_cast<int>(sv)];
  double d = 0, cum = 0;
  for (int k = 0; k <= m_edges; ++k) {
    cum += counts[k];
    double c = normal_cdf((k + 0.5 - mu) / sd);
    d = std::max(d, std::abs(cum / sums.size() - c));
  }
  rep.ks_distance = d;

  double m3 = 0, m4 = 0;
  for (double zi : rep.standardized) {
    m3 += zi * zi * zi;
    m4 += zi * zi * zi * zi;
  }
  rep.skewness = m3 / rep.standardized.size();
  rep.excess_kurtosis = m4 / rep.standardized.size() - 3.0;
  return rep;
}

// --- covariance and conditional-marginal estimators ---

struct CovarianceReport {
  ConfidenceInterval cov_disjoint;   // Cov(X_e, X_f), e,f vertex-disjoint
  ConfidenceInterval cov_sharing;    // Cov(X_e, X_f), e,f sharing a vertex
  ConfidenceInterval three_point;    // E prod of three centered disjoint edges
};

inline ConfidenceInterval covariance_ci(const SampleBank& bank,
                                        const std::vector<EdgePair>& edges,
                                        std::uint64_t seed) {
  std::vector<std::vector<double>> vals(edges.size(),
                                        std::vector<double>(bank.samples.size()));
  for (std::size_t s = 0; s < bank.samples.size(); ++s)
    for (std::size_t k = 0; k < edges.size(); ++k)
      vals[k][s] = bank.samples[s].get(edges[k]) ? 1.0 : 0.0;
  auto stat = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> m(edges.size(), 0);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      for (auto i : idx) m[k] += vals[k][i];
      m[k] /= idx.size();
    }
    double acc = 0;
    for (auto i : idx) {
      double prod = 1;
      for (std::size_t k = 0; k < edges.size(); ++k) prod *= vals[k][i] - m[k];
      acc += prod;
    }
    return acc / idx.size();
  };
  return bootstrap_ci(bank.samples.size(), stat, seed);
}

inline CovarianceReport correlation_decay(const SampleBank& bank,
                                          std::uint64_t seed) {
  CovarianceReport rep;
  rep.cov_disjoint = covariance_ci(bank, {EdgePair(0, 1), EdgePair(2, 3)}, seed);
  rep.cov_sharing = covariance_ci(bank, {EdgePair(0, 1), EdgePair(0, 2)}, seed + 1);
  rep.three_point =
      covariance_ci(bank, {EdgePair(0, 1), EdgePair(2, 3), EdgePair(4, 5)}, seed + 2);
  return rep;
}

/// |P(X_e=1 | A=a) - P(X_e=1 | A=b)| with a bootstrap CI. Throws if either
/// conditioning event has fewer than 200 hits.
inline ConfidenceInterval conditional_marginal_shift(
    const SampleBank& bank, const EdgePair& target,
    const std::vector<EdgePair>& cond, const std::vector<int>& a,
    const std::vector<int>& b, std::uint64_t seed) {
  if (cond.size() > 3)
    throw std::invalid_argument("conditional_marginal_shift: conditioning set <= 3");
  std::size_t count = bank.samples.size();
  std::vector<char> in_a(count), in_b(count), tgt(count);
  std::size_t hits_a = 0, hits_b = 0;
  for (std::size_t s = 0; s < count; ++s) {
    bool ma = true, mb = true;
    for (std::size_t k = 0; k < cond.size(); ++k) {
      int v = bank.samples[s].get(cond[k]) ? 1 : 0;
      if (v != a[k]) ma = false;
      if (v != b[k]) mb = false;
    }
    in_a[s] = ma;
    in_b[s] = mb;
    tgt[s] = bank.samples[s].get(target);
    hits_a += ma;
    hits_b += mb;
  }
  if (hits_a < 200 || hits_b < 200)
    throw std::runtime_error("conditional_marginal_shift: insufficient data (" +
                             std::to_string(hits_a) + ", " +
                             std::to_string(hits_b) + " hits)");
  auto stat = [&](const std::vector<std::size_t>& idx) {
    double na = 0, nb = 0, sa = 0, sb = 0;
    for (auto i : idx) {
      if (in_a[i]) {
        na += 1;
        sa += tgt[i];
      }
      if (in_b[i]) {
        nb += 1;
        sb += tgt[i];
      }
    }
    if (na == 0 || nb == 0) return 0.0;
    return std::abs(sa / na - sb / nb);
  };
  return bootstrap_ci(count, stat, seed);
}

// --- marginal vs p* and W1 scaling ---

struct MarginalRow {
  int n;
  double density;
  double p_star;
  double deviation;             // |density - p*|
  double normalized_deviation;  // deviation * sqrt(n / log n)
};

inline ModelSpec rescale_model(const ModelSpec& m, int n) {
  return ModelSpec(n, m.terms);
}

inline std::vector<MarginalRow> marginal_vs_pstar(const ModelSpec& base,
                                                  const std::vector<int>& n_grid,
                                                  std::size_t samples_per_n,
                                                  std::uint64_t seed,
                                                  int threads = 1) {
  std::vector<MarginalRow> rows;
  for (int n : n_grid) {
    ModelSpec m = rescale_model(base, n);
    PhaseReport rep = classify(m);
    if (rep.classification != Phase::Subcritical)
      throw std::runtime_error("marginal_vs_pstar: model not subcritical at n=" +
                               std::to_string(n));
    SampleBank bank = draw_bank(m, samples_per_n, default_burn_in(n),
                                std::max<std::uint64_t>(1, n * n / 4), seed + n,
                                8, threads);
    double me = static_cast<double>(num_edges(n));
    double dens = 0;
    for (auto& x : bank.samples) dens += x.edge_count() / me;
    dens /= bank.samples.size();
    double dev = std::abs(dens - rep.p_star);
    rows.push_back({n, dens, rep.p_star, dev,
                    dev * std::sqrt(static_cast<double>(n) / std::log(n))});
  }
  return rows;
}

struct W1Row {
  int n;
  double mean_hamming;         // time-averaged d_H(X, Y)
  double normalized;           // mean_hamming / (n^{3/2} sqrt(log n))
  double sweep_discrepancies;  // mean per-sweep discrepancy count
  double sweep_normalized;
  double field_dev_q90;        // 90th percentile of |dH_I(X) - Psi(p*)|
};

inline std::vector<W1Row> w1_scaling(const ModelSpec& base,
                                     const std::vector<int>& n_grid,
                                     double steps_multiplier, std::uint64_t seed,
                                     int threads = 1) {
  std::vector<W1Row> rows;
  for (int n : n_grid) {
    ModelSpec m = rescale_model(base, n);
    PhaseReport rep = classify(m);
    if (rep.classification != Phase::Subcritical)
      throw std::runtime_error("w1_scaling: model not subcritical");
    double p_star = rep.p_star;

    RngStream init_rng(seed, 1000 + n);
    Configuration x = Configuration::complete(n);
    for (std::uint64_t t = 0; t < default_burn_in(n); ++t)
      glauber_step(m, x, init_rng);
    Configuration y = make_init(m, "gnp(" + std::to_string(p_star) + ")", init_rng);

    auto steps = static_cast<std::uint64_t>(steps_multiplier * n * n);
    RunTrace tr = ergm_er_coupled_run(m, p_star, steps, seed + n, x, y,
                                      std::max<std::uint64_t>(1, n * n / 16));
    // time-average over the second half, past the initial transient
    const auto& ham = tr.observables.at("hamming");
    const auto& dev = tr.observables.at("field_dev");
    std::size_t half = ham.size() / 2;
    double mh = 0;
    for (std::size_t i = half; i < ham.size(); ++i) mh += ham[i];
    mh /= (ham.size() - half);
    std::vector<double> devs(dev.begin() + half, dev.end());
    std::sort(devs.begin(), devs.end());
    double q90 = devs[static_cast<std::size_t>(0.9 * (devs.size() - 1))];

    // sequential-sweep variant from stationarity
    RngStream sweep_rng(seed, 2000 + n);
    double disc = 0;
    const int sweeps = 50;
    Configuration xs = x, ys = y;
    for (int s = 0; s < sweeps; ++s) {
      auto res = sequential_sweep_coupled(m, xs, ys, p_star, sweep_rng);
      disc += static_cast<double>(res.discrepancies);
      xs = std::move(res.x);
      ys = std::move(res.y);
    }
    disc /= sweeps;

    double scale = std::pow(n, 1.5) * std::sqrt(std::log(n));
    rows.push_back({n, mh, mh / scale, disc, disc / scale, q90});
  }
  (void)threads;
  return rows;
}

// --- maximum pseudo-likelihood ---

struct MpleFit {
  std::vector<double> beta_hat;
  std::vector<double> beta_se;  // from the inverse observed information
  double log_pseudo_likelihood;
  double hessian_condition;
  bool converged;
  int iterations;
};

namespace detail {

inline std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b) {
  // Gaussian elimination with partial pivoting, s <= 8
  std::size_t s = b.size();
  for (std::size_t c = 0; c < s; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < s; ++r)
      if (std::abs(a[r * s + c]) > std::abs(a[piv * s + c])) piv = r;
    if (std::abs(a[piv * s + c]) < 1e-300)
      throw std::runtime_error("singular Hessian");
    if (piv != c) {
      for (std::size_t k = 0; k < s; ++k) std::swap(a[c * s + k], a[piv * s + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < s; ++r) {
      double f = a[r * s + c] / a[c * s + c];
      for (std::size_t k = c; k < s; ++k) a[r * s + k] -= f * a[c * s + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(s);
  for (std::size_t r = s; r-- > 0;) {
    double acc = b[r];
    for (std::size_t k = r + 1; k < s; ++k) acc -= a[r * s + k] * x[k];
    x[r] = acc / a[r * s + r];
  }
  return x;
}

inline std::pair<double, double> extreme_eigen_sym(std::vector<double> a,
                                                   std::size_t s) {
  // Jacobi rotations; fine at s <= 8
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < s; ++p)
      for (std::size_t q = p + 1; q < s; ++q) off += a[p * s + q] * a[p * s + q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < s; ++p)
      for (std::size_t q = p + 1; q < s; ++q) {
        if (std::abs(a[p * s + q]) < 1e-300) continue;
        double theta = (a[q * s + q] - a[p * s + p]) / (2 * a[p * s + q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), sn = t * c;
        for (std::size_t k = 0; k < s; ++k) {
          double akp = a[k * s + p], akq = a[k * s + q];
          a[k * s + p] = c * akp - sn * akq;
          a[k * s + q] = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < s; ++k) {
          double apk = a[p * s + k], aqk = a[q * s + k];
          a[p * s + k] = c * apk - sn * aqk;
          a[q * s + k] = sn * apk + c * aqk;
        }
      }
  }
  double lo = a[0], hi = a[0];
  for (std::size_t k = 1; k < s; ++k) {
    lo = std::min(lo, a[k * s + k]);
    hi = std::max(hi, a[k * s + k]);
  }
  return {lo, hi};
}

}  // namespace detail

/// Logistic fit of beta on the pinned-count features, by damped Newton from
/// beta ~ 0. The objective is concave, so the maximizer is unique whenever
/// the feature matrix has full rank; the Hessian condition number surfaces
/// the multi-term near-degeneracy.
inline MpleFit mple_fit(const Configuration& x, const ModelSpec& tmpl) {
  if (x.n() != tmpl.n) throw std::invalid_argument("mple_fit: n mismatch");
  std::size_t s = tmpl.terms.size();
  std::size_t me = x.num_edges_total();

  // features z_{e,i} = N_{G_i}(x, e) / n^{|V_i|-2}
  std::vector<double> z(me * s);
  std::vector<char> xe(me);
  for (std::size_t idx = 0; idx < me; ++idx) {
    EdgePair e = edge_from_index(idx, x.n());
    xe[idx] = x.get(idx);
    for (std::size_t i = 0; i < s; ++i)
      z[idx * s + i] =
          count_to_double(count_motif_pinned(x, tmpl.terms[i].first, e)) /
          term_scale(tmpl, static_cast<int>(i));
  }

  auto loglik = [&](const std::vector<double>& beta) {
    double ll = 0;
    for (std::size_t idx = 0; idx < me; ++idx) {
      double u = 0;
      for (std::size_t i = 0; i < s; ++i) u += beta[i] * z[idx * s + i];
      // x u - log(1 + e^u), stable branch
      ll += (xe[idx] ? u : 0.0) - (u > 30 ? u : std::log1p(std::exp(u)));
    }
    return ll;
  };

  std::vector<double> beta(s, 1e-6);
  double ll = loglik(beta);
  MpleFit fit{beta, {}, ll, std::nan(""), false, 0};
  std::vector<double> grad(s), hess(s * s);

  const int max_iter = 200;
  for (int it = 0; it < max_iter; ++it) {
    fit.iterations = it + 1;
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    double max_resid = 0;
    for (std::size_t idx = 0; idx < me; ++idx) {
      double u = 0;
      for (std::size_t i = 0; i < s; ++i) u += beta[i] * z[idx * s + i];
      double p = logistic(u), w = p * (1 - p);
      max_resid = std::max(max_resid, std::abs((xe[idx] ? 1.0 : 0.0) - p));
      for (std::size_t i = 0; i < s; ++i) {
        grad[i] += ((xe[idx] ? 1.0 : 0.0) - p) * z[idx * s + i];
        for (std::size_t j = 0; j < s; ++j)
          hess[i * s + j] += w * z[idx * s + i] * z[idx * s + j];  // -H
      }
    }
    double gnorm = 0;
    for (double gv : grad) gnorm = std::max(gnorm, std::abs(gv));
    if (gnorm < 1e-8) {
      // an interior optimum has O(1) residuals that cancel; a gradient that
      // vanished because every conditional saturated is perfect separation
      fit.converged = max_resid > 1e-6;
      break;
    }
    double bnorm = 0;
    for (double b : beta) bnorm = std::max(bnorm, std::abs(b));
    if (bnorm > 50) break;  // separation guard: beta running away
    std::vector<double> step;
    try {
      step = detail::solve_spd(hess, grad);
    } catch (const std::runtime_error&) {
      break;  // singular beyond tolerance: report non-converged
    }
    // step halving until the pseudo-likelihood increases; near the optimum
    // the improvement underflows before the gradient does, so the full
    // Newton step is accepted on a flat plateau and gnorm decides
    double t = 1.0;
    bool improved = false;
    for (int half = 0; half < 60; ++half, t *= 0.5) {
      std::vector<double> cand(s);
      for (std::size_t i = 0; i < s; ++i) cand[i] = beta[i] + t * step[i];
      double cl = loglik(cand);
      if (cl > ll || (half == 0 && cl >= ll - 1e-9 * (1 + std::abs(ll)))) {
        beta = std::move(cand);
        ll = cl;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }

  fit.beta_hat = beta;
  fit.log_pseudo_likelihood = ll;

  // observed information at the final beta, for standard errors
  std::fill(hess.begin(), hess.end(), 0.0);
  for (std::size_t idx = 0; idx < me; ++idx) {
    double u = 0;
    for (std::size_t i = 0; i < s; ++i) u += beta[i] * z[idx * s + i];
    double p = logistic(u), w = p * (1 - p);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j)
        hess[i * s + j] += w * z[idx * s + i] * z[idx * s + j];
  }
  fit.beta_se.assign(s, std::nan(""));
  try {
    for (std::size_t i = 0; i < s; ++i) {
      std::vector<double> unit(s, 0.0);
      unit[i] = 1.0;
      std::vector<double> col = detail::solve_spd(hess, unit);
      if (col[i] > 0) fit.beta_se[i] = std::sqrt(col[i]);
    }
  } catch (const std::runtime_error&) {
  }

  if (s == 1) {
    fit.hessian_condition = 1.0;
  } else {
    auto [lo, hi] = detail::extreme_eigen_sym(hess, s);
    fit.hessian_condition = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  }
  return fit;
}

}  // namespace ergm
