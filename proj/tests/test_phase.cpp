#include <catch2/catch_amalgamated.hpp>

#include "ergm/phase.hpp"

using namespace ergm;

namespace {
ModelSpec triangle_model(int n, double beta) {
  return ModelSpec(n, {{motif_triangle(), beta}});
}
}  // namespace

TEST_CASE("psi and its derivative") {
  ModelSpec m(16, {{motif_edge(), 0.5}, {motif_triangle(), 0.2}});
  // 2*0.5*1 + 2*0.2*3*p^2
  CHECK_THAT(psi(m, 0.0), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(psi(m, 0.5), Catch::Matchers::WithinAbs(1.0 + 1.2 * 0.25, 1e-12));
  for (double p : {0.1, 0.4, 0.9}) {
    double h = 1e-6;
    double fd = (psi(m, p + h) - psi(m, p - h)) / (2 * h);
    CHECK_THAT(psi_prime(m, p), Catch::Matchers::WithinAbs(fd, 1e-6));
  }
  CHECK(psi_prime(ModelSpec(8, {{motif_edge(), 1.0}}), 0.3) == 0.0);
  CHECK_THROWS_AS(psi(m, 1.5), std::invalid_argument);
}

TEST_CASE("edge-only model is subcritical with p* = Phi(2 beta)") {
  for (double beta : {0.1, 0.5, 2.0}) {
    ModelSpec m(16, {{motif_edge(), beta}});
    PhaseReport rep = classify(m);
    CHECK(rep.classification == Phase::Subcritical);
    REQUIRE(rep.roots.size() == 1);
    CHECK_THAT(rep.p_star, Catch::Matchers::WithinAbs(logistic(2 * beta), 1e-10));
    CHECK(rep.roots[0].phi_prime == 0.0);
    CHECK(rep.dobrushin_sum == 0.0);
    CHECK(rep.in_DU);
  }
}

TEST_CASE("k5 model at beta 1 is supercritical with three fixed points") {
  ModelSpec m(16, {{motif_complete(5, "k5"), 1.0}});
  PhaseReport rep = classify(m);
  CHECK(rep.classification == Phase::Supercritical);
  CHECK(rep.roots.size() == 3);
  CHECK(rep.roots[0].phi_prime < 1.0);
  CHECK(rep.roots[1].phi_prime > 1.0);
  CHECK(rep.roots[2].phi_prime < 1.0);
  CHECK_FALSE(rep.in_DU);
  CHECK(std::isnan(rep.p_star));
}

TEST_CASE("triangle at beta 0.2 is subcritical inside Dobrushin uniqueness") {
  ModelSpec m = triangle_model(16, 0.2);
  PhaseReport rep = classify(m);
  CHECK(rep.classification == Phase::Subcritical);
  CHECK_THAT(rep.dobrushin_sum, Catch::Matchers::WithinAbs(0.6, 1e-12));
  CHECK(rep.in_DU);
  // frozen from an independent scan of Phi(1.2 p^2) = p
  CHECK_THAT(rep.p_star, Catch::Matchers::WithinAbs(0.6097107883006, 1e-9));
}

TEST_CASE("L row-sum bound sits strictly below the Dobrushin value") {
  ModelSpec m = triangle_model(16, 0.2);
  double ds = dobrushin_sum(m).first;
  double prev = 0.0;
  for (int n : {8, 16, 32, 64, 256}) {
    double l1 = l1_norm_bound(m, n);
    CHECK(l1 < ds);
    CHECK(l1 > prev);  // increases toward the Dobrushin value
    prev = l1;
  }
  // triangle closed form: (1/4) beta 2 * 6(n-2) / n = 3 beta (n-2)/n
  CHECK_THAT(l1_norm_bound(m, 16),
             Catch::Matchers::WithinAbs(3 * 0.2 * 14.0 / 16.0, 1e-12));
}

TEST_CASE("classification is invariant under splitting a term") {
  ModelSpec whole = triangle_model(16, 0.2);
  ModelSpec split(16, {{motif_triangle(), 0.1}, {motif_triangle(), 0.1}});
  PhaseReport a = classify(whole), b = classify(split);
  CHECK(a.classification == b.classification);
  CHECK_THAT(a.p_star, Catch::Matchers::WithinAbs(b.p_star, 1e-9));
  CHECK_THAT(a.dobrushin_sum, Catch::Matchers::WithinAbs(b.dobrushin_sum, 1e-12));
}

TEST_CASE("subcriticality is lost once and never regained along a beta sweep") {
  // k5 models cross the boundary as beta grows; past it the classifier may
  // alternate between NearCritical and Supercritical as roots drift through
  // the near-critical band, but it never returns to Subcritical
  bool left_subcritical = false;
  bool order_ok = true;
  int last = 0;
  for (double beta = 0.1; beta < 1.0; beta += 0.01) {
    ModelSpec m(16, {{motif_complete(5, "k5"), beta}});
    PhaseReport rep = classify(m);
    bool sub = rep.classification == Phase::Subcritical;
    if (!sub) left_subcritical = true;
    if (sub && left_subcritical) order_ok = false;
    last = rep.classification == Phase::Supercritical ? 2 : (sub ? 0 : 1);
  }
  CHECK(order_ok);
  CHECK(left_subcritical);
  CHECK(last == 2);
}

TEST_CASE("classifier rejects bad parameters") {
  ModelSpec m = triangle_model(8, 0.2);
  CHECK_THROWS_AS(classify(m, 100), std::invalid_argument);
  CHECK_THROWS_AS(classify(m, 10000, 0.5), std::invalid_argument);
}
