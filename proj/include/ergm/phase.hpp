#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergm/model.hpp"

namespace ergm {

enum class Phase { Subcritical, Supercritical, NearCritical };

inline std::string phase_name(Phase p) {
  switch (p) {
    case Phase::Subcritical: return "Subcritical";
    case Phase::Supercritical: return "Supercritical";
    default: return "NearCritical";
  }
}

struct PhaseReport {
  struct Root {
    double p;
    double phi_prime;
  };
  std::vector<Root> roots;  // ascending in p
  Phase classification;
  double p_star;  // meaningful iff Subcritical
  double dobrushin_sum;
  bool in_DU;
  double l1_bound;
};

/// Psi_beta(p) = sum_i 2 beta_i |E_i| p^{|E_i|-1}.
inline double psi(const ModelSpec& m, double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("psi: p outside [0,1]");
  double s = 0;
  for (auto& [g, beta] : m.terms) {
    int ne = g.num_motif_edges();
    s += 2.0 * beta * ne * std::pow(p, ne - 1);
  }
  return s;
}

inline double psi_prime(const ModelSpec& m, double p) {
  double s = 0;
  for (auto& [g, beta] : m.terms) {
    int ne = g.num_motif_edges();
    if (ne >= 2) s += 2.0 * beta * ne * (ne - 1) * std::pow(p, ne - 2);
  }
  return s;
}

/// (phi_beta(p), phi_beta'(p)) with phi = Phi o Psi.
inline std::pair<double, double> phi_and_derivative(const ModelSpec& m, double p) {
  double u = psi(m, p);
  return {logistic(u), logistic_prime(u) * psi_prime(m, p)};
}

/// Dobrushin condition value (1/2) sum_i beta_i |E_i|(|E_i|-1) and the
/// DU flag (value < 1).
inline std::pair<double, bool> dobrushin_sum(const ModelSpec& m) {
  double s = 0;
  for (auto& [g, beta] : m.terms) {
    int ne = g.num_motif_edges();
    s += 0.5 * beta * ne * (ne - 1);
  }
  return {s, s < 1.0};
}

/// Common row sum of the L matrix at size n, computed from the closed-form
/// pinned count on K_n: (1/4) sum_i beta_i (|E_i|-1) N_{G_i}(K_n, f) / n^{|V_i|-2}.
/// Strictly below the Dobrushin value for every finite n, increasing toward it.
inline double l1_norm_bound(const ModelSpec& m, int n) {
  double s = 0;
  for (auto& [g, beta] : m.terms) {
    int ne = g.num_motif_edges();
    double cnt = count_to_double(complete_graph_pinned_count(g, n));
    s += 0.25 * beta * (ne - 1) * cnt /
         std::pow(static_cast<double>(n), g.vertex_count - 2);
  }
  return s;
}

/// Scan phi(p) - p for sign changes on a uniform grid, bisect each bracket,
/// and classify the fixed-point structure.
inline PhaseReport classify(const ModelSpec& m, int grid = 10000,
                            double eps_crit = 1e-3) {
  if (grid < 1000) throw std::invalid_argument("classify: grid >= 1000");
  if (!(eps_crit > 0 && eps_crit < 0.1))
    throw std::invalid_argument("classify: eps_crit in (0, 0.1)");
  const double eps_tangent = 1e-6;

  auto g = [&](double p) { return phi_and_derivative(m, p).first - p; };

  PhaseReport rep{};
  bool tangency = false;
  double prev_p = 0.0, prev_g = g(0.0);
  for (int k = 1; k <= grid; ++k) {
    double p = static_cast<double>(k) / grid;
    double gp = g(p);
    if ((prev_g > 0) != (gp > 0) || gp == 0) {
      double lo = prev_p, hi = p, glo = prev_g;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (std::abs(gm) < 1e-12) {
          lo = hi = mid;
          break;
        }
        if ((glo > 0) == (gm > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      double root = 0.5 * (lo + hi);
      rep.roots.push_back({root, phi_and_derivative(m, root).second});
    } else if (std::abs(gp) < eps_tangent) {
      // grazing the axis without a sign change
      tangency = true;
    }
    prev_p = p;
    prev_g = gp;
  }

  int stable = 0;
  bool near = tangency;
  for (auto& r : rep.roots) {
    if (r.phi_prime < 1.0 - eps_crit)
      ++stable;
    else if (r.phi_prime < 1.0 + eps_crit)
      near = true;  // derivative within eps_crit of 1: refuse to guess
  }
  if (near)
    rep.classification = Phase::NearCritical;
  else if (rep.roots.size() == 1 && stable == 1)
    rep.classification = Phase::Subcritical;
  else if (rep.roots.size() >= 2 && stable >= 2)
    rep.classification = Phase::Supercritical;
  else
    rep.classification = Phase::NearCritical;

  rep.p_star = rep.classification == Phase::Subcritical ? rep.roots[0].p
                                                        : std::nan("");
  auto [ds, du] = dobrushin_sum(m);
  rep.dobrushin_sum = ds;
  rep.in_DU = du;
  rep.l1_bound = l1_norm_bound(m, m.n);
  return rep;
}

}  // namespace ergm
