#include <catch2/catch_amalgamated.hpp>

#include "ergm/oracle.hpp"

using namespace ergm;

namespace {

ModelSpec edge_only(int n, double beta) {
  return ModelSpec(n, {{motif_edge(), beta}});
}

ModelSpec mixed4() {
  return ModelSpec(4, {{motif_edge(), 0.5}, {motif_triangle(), 0.1}});
}

}  // namespace

TEST_CASE("edge-only enumeration gives the product law") {
  double beta = 0.5;
  ExactGibbs g = enumerate_gibbs(edge_only(3, beta));
  double p = logistic(2 * beta);
  for (std::uint64_t i = 0; i < 8; ++i) {
    int k = std::popcount(i);
    double expect = std::pow(p, k) * std::pow(1 - p, 3 - k);
    CHECK_THAT(g.table[i], Catch::Matchers::WithinAbs(expect, 1e-12));
  }
}

TEST_CASE("table is a probability vector") {
  ExactGibbs g = enumerate_gibbs(mixed4());
  double sum = 0;
  for (double p : g.table) {
    CHECK(p > 0);
    sum += p;
  }
  CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(g.table.size() == 64);
  CHECK_THROWS_AS(enumerate_gibbs(edge_only(8, 0.5)), std::invalid_argument);
}

TEST_CASE("vanishing beta gives the uniform distribution") {
  ExactGibbs g = enumerate_gibbs(ModelSpec(4, {{motif_triangle(), 1e-12}}));
  for (double p : g.table)
    CHECK_THAT(p, Catch::Matchers::WithinAbs(1.0 / 64, 1e-9));
}

TEST_CASE("probabilities are invariant under vertex relabeling") {
  ExactGibbs g = enumerate_gibbs(mixed4());
  std::vector<int> perm = {2, 0, 3, 1};
  for (std::uint64_t i = 0; i < g.table.size(); ++i) {
    Configuration x = g.config_at(i);
    Configuration y(4);
    for (std::size_t idx = 0; idx < 6; ++idx)
      if (x.get(idx)) {
        EdgePair e = edge_from_index(idx, 4);
        y.set(EdgePair(perm[e.i], perm[e.j]), true);
      }
    CHECK_THAT(g.table[ExactGibbs::index_of(y)],
               Catch::Matchers::WithinAbs(g.table[i], 1e-13));
  }
}

TEST_CASE("marginals are consistent and FKG holds at n=4") {
  ExactGibbs g = enumerate_gibbs(mixed4());
  EdgePair e(0, 1);
  CHECK_THAT(exact_marginal(g, {e}, {0}) + exact_marginal(g, {e}, {1}),
             Catch::Matchers::WithinAbs(1.0, 1e-13));
  CHECK(exact_marginal(g, {}, {}) == 1.0);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a + 1; b < 6; ++b)
      CHECK(exact_k_correlation(
                g, {edge_from_index(a, 4), edge_from_index(b, 4)}) >= 0.0);
}

TEST_CASE("edge-only marginals factorize and correlations vanish") {
  ExactGibbs g = enumerate_gibbs(edge_only(4, 0.3));
  double p = logistic(0.6);
  EdgePair e(0, 1), f(2, 3);
  CHECK_THAT(exact_marginal(g, {e, f}, {1, 1}),
             Catch::Matchers::WithinAbs(p * p, 1e-13));
  CHECK_THAT(exact_k_correlation(g, {e, f}),
             Catch::Matchers::WithinAbs(0.0, 1e-14));
  CHECK_THAT(exact_k_correlation(g, {e}), Catch::Matchers::WithinAbs(0.0, 1e-14));
}

TEST_CASE("detailed balance holds and the detector sees injected faults") {
  ExactGibbs g = enumerate_gibbs(mixed4());
  CHECK(detailed_balance_check(g) < 1e-12);
  // sensitivity: perturb a rate at a state carrying enough mass that the
  // 1e-6 fault is visible above the 1e-7 floor
  ExactGibbs conc = enumerate_gibbs(edge_only(3, 2.0));
  double perturbed = detailed_balance_check(
      conc, [](std::uint64_t s, std::size_t e, double rate) {
        return (s == 7 && e == 0) ? rate + 1e-6 : rate;
      });
  CHECK(perturbed >= 1e-7);
}

TEST_CASE("rational detailed balance is exactly zero") {
  CHECK(detailed_balance_check_rational(edge_only(3, 0.5)) == 0);
  CHECK(detailed_balance_check_rational(
            ModelSpec(3, {{motif_edge(), 0.5}, {motif_triangle(), 0.1}})) == 0);
  CHECK_THROWS_AS(detailed_balance_check_rational(edge_only(6, 0.5)),
                  std::invalid_argument);
}

TEST_CASE("edge-only spectral gap is exactly one over M") {
  ExactGibbs g = enumerate_gibbs(edge_only(4, 0.5));
  SpectralReport rep = exact_spectral_gap(g);
  CHECK_THAT(rep.gap, Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-8));
}

TEST_CASE("spectral gap satisfies the variational bounds") {
  ExactGibbs g = enumerate_gibbs(ModelSpec(4, {{motif_triangle(), 0.2}}));
  SpectralReport rep = exact_spectral_gap(g);
  CHECK(rep.gap > 0);
  CHECK(rep.gap < 1);

  // gap <= E(f,f)/Var(f) for any nonconstant f
  std::vector<double> f(g.table.size());
  for (std::uint64_t i = 0; i < f.size(); ++i) f[i] = (i >> 2) & 1;
  double quotient = dirichlet_form(g, f) / gibbs_variance(g, f);
  CHECK(rep.gap <= quotient + 1e-10);

  // Poincare for random f
  RngStream rng(15);
  for (int rep_i = 0; rep_i < 100; ++rep_i) {
    for (auto& v : f) v = rng.uniform01();
    CHECK(gibbs_variance(g, f) <= dirichlet_form(g, f) / rep.gap + 1e-9);
  }

  std::vector<double> constant(g.table.size(), 3.7);
  CHECK(dirichlet_form(g, constant) == 0.0);
}

TEST_CASE("dirichlet form of a point indicator matches a direct sum") {
  ModelSpec m = edge_only(3, 0.4);
  ExactGibbs g = enumerate_gibbs(m);
  std::uint64_t target = 5;
  std::vector<double> f(8, 0.0);
  f[target] = 1.0;
  // (f(x^e)-f(x))^2 is 1 exactly on transitions touching the target
  double expect = 0;
  Configuration xt = g.config_at(target);
  for (std::size_t b = 0; b < 3; ++b) {
    EdgePair e = edge_from_index(b, 3);
    std::uint64_t nb = target ^ (1ull << b);
    Configuration xn = g.config_at(nb);
    expect += (1.0 / 3) * flip_rate(m, xt, e) * g.table[target];
    expect += (1.0 / 3) * flip_rate(m, xn, e) * g.table[nb];
  }
  CHECK_THAT(dirichlet_form(g, f), Catch::Matchers::WithinAbs(expect, 1e-14));
}

TEST_CASE("free energy increases in beta") {
  double prev = -1e300;
  for (double beta : {0.1, 0.3, 0.6, 1.0}) {
    ExactGibbs g = enumerate_gibbs(ModelSpec(4, {{motif_triangle(), beta}}));
    CHECK(g.free_energy > prev);
    prev = g.free_energy;
  }
}

TEST_CASE("a chain started from an exact sample stays stationary") {
  ModelSpec m = edge_only(3, 0.6);
  ExactGibbs g = enumerate_gibbs(m);
  std::vector<double> cdf(g.table.size());
  double acc = 0;
  for (std::size_t i = 0; i < g.table.size(); ++i) {
    acc += g.table[i];
    cdf[i] = acc;
  }
  RngStream rng(19);
  const int replicates = 40000;
  std::vector<int> hist(g.table.size(), 0);
  for (int r = 0; r < replicates; ++r) {
    double u = rng.uniform01();
    std::size_t idx =
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    Configuration x = g.config_at(idx);
    for (int t = 0; t < 5; ++t) glauber_step(m, x, rng);
    ++hist[ExactGibbs::index_of(x)];
  }
  double chi2 = 0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    double expect = g.table[i] * replicates;
    chi2 += (hist[i] - expect) * (hist[i] - expect) / expect;
  }
  CHECK(chi2 < 24.3);  // 99.9% quantile at 7 dof
}
