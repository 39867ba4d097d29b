#include <catch2/catch_amalgamated.hpp>

#include "ergm/dynamics.hpp"
#include "ergm/phase.hpp"

using namespace ergm;

namespace {
ModelSpec triangle16() { return ModelSpec(16, {{motif_triangle(), 0.2}}); }
}  // namespace

TEST_CASE("glauber step consumes exactly two draws") {
  ModelSpec m = triangle16();
  RngStream rng(1), shadow(1);
  Configuration x(16);
  for (int t = 0; t < 50; ++t) {
    glauber_step(m, x, rng);
    shadow.next_u64();
    shadow.next_u64();
    CHECK(rng.next_u64() == shadow.next_u64());
  }
}

TEST_CASE("traces are bit-identical for a repeated seed") {
  ModelSpec m = triangle16();
  RunTrace a = run_chain(m, "empty", 5000, 50, 77);
  RunTrace b = run_chain(m, "empty", 5000, 50, 77);
  CHECK(a.sample_times == b.sample_times);
  CHECK(a.observables.at("edge_count") == b.observables.at("edge_count"));
  RunTrace c = run_chain(m, "empty", 5000, 50, 78);
  CHECK(a.observables.at("edge_count") != c.observables.at("edge_count"));
}

TEST_CASE("zero steps records only the initial state") {
  ModelSpec m = triangle16();
  RunTrace tr = run_chain(m, "full", 0, 10, 1);
  REQUIRE(tr.sample_times.size() == 1);
  CHECK(tr.observables.at("edge_count")[0] == 120.0);
}

TEST_CASE("init specs") {
  ModelSpec m = triangle16();
  RngStream rng(2);
  CHECK(make_init(m, "empty", rng).edge_count() == 0);
  CHECK(make_init(m, "full", rng).edge_count() == 120);
  Configuration g = make_init(m, "gnp(0.5)", rng);
  CHECK(g.edge_count() > 30);
  CHECK(g.edge_count() < 90);
  Configuration h = make_init(m, g.to_hex(), rng);
  CHECK(h == g);
  CHECK_THROWS_AS(make_init(m, "banana", rng), std::invalid_argument);
  CHECK_THROWS_AS(make_init(m, Configuration(5).to_hex(), rng),
                  std::invalid_argument);
}

TEST_CASE("edge-only chain reaches the product stationary density") {
  double beta = 0.5;
  ModelSpec m(16, {{motif_edge(), beta}});
  RunTrace tr = run_chain(m, "empty", 400000, 100, 5);
  const auto& counts = tr.observables.at("edge_count");
  double mean = 0;
  std::size_t half = counts.size() / 2;
  for (std::size_t i = half; i < counts.size(); ++i) mean += counts[i];
  mean /= (counts.size() - half);
  double expect = 120.0 * logistic(2 * beta);
  CHECK_THAT(mean, Catch::Matchers::WithinAbs(expect, 3.0));
}

TEST_CASE("grand coupling preserves the partial order") {
  ModelSpec m(8, {{motif_triangle(), 0.2}});
  RngStream rng(4);
  Configuration lo(8), hi = Configuration::complete(8);
  Configuration a(8), b(8);  // equal pair stays equal
  for (int t = 0; t < 20000; ++t) {
    grand_coupled_step(m, {&lo, &hi, &a, &b}, rng);
    REQUIRE(partial_order_leq(lo, hi));
    REQUIRE(a == b);
  }
  CHECK(lo == hi);  // coalesced long before 20k steps at n=8
}

TEST_CASE("grand coupling on a single state matches the plain step") {
  ModelSpec m = triangle16();
  RngStream r1(9), r2(9);
  Configuration x(16), y(16);
  for (int t = 0; t < 500; ++t) {
    glauber_step(m, x, r1);
    grand_coupled_step(m, {&y}, r2);
    REQUIRE(x == y);
  }
}

TEST_CASE("sandwich run records hamming decay and coalescence") {
  ModelSpec m = triangle16();
  RunTrace tr = pm_sandwich_run(m, 5000, 1, 11);
  CHECK(tr.observables.at("hamming")[0] == 120.0);
  REQUIRE(tr.coalescence_step.has_value());
  const auto& ham = tr.observables.at("hamming");
  for (std::size_t i = 0; i < tr.sample_times.size(); ++i)
    if (tr.sample_times[i] >= *tr.coalescence_step) CHECK(ham[i] == 0.0);
}

TEST_CASE("mixing estimate behaves like coupon collection for edge-only") {
  ModelSpec m(8, {{motif_edge(), 0.5}});
  double mm = static_cast<double>(num_edges(8));
  TmixEstimate est = estimate_tmix(m, 0.25, 64, 3);
  CHECK_FALSE(est.capped);
  CHECK(est.steps >= static_cast<std::uint64_t>(mm));
  CHECK(est.steps <= static_cast<std::uint64_t>(10 * mm * std::log(mm)));
  CHECK(estimate_tmix(m, 1.0, 8, 3).steps == 0);
  CHECK_THROWS_AS(estimate_tmix(m, 0.0, 8, 3), std::invalid_argument);
}

TEST_CASE("replica pools merge deterministically") {
  ModelSpec m = triangle16();
  auto run = [&](int threads) {
    std::vector<std::uint64_t> out(12, 0);
    parallel_replicas(12, threads, [&](std::size_t r) {
      RngStream rng(100, r);
      Configuration x(16);
      for (int t = 0; t < 2000; ++t) glauber_step(m, x, rng);
      out[r] = x.edge_count();
    });
    return out;
  };
  CHECK(run(1) == run(4));
}

TEST_CASE("coupled run against the matching product law coalesces for good") {
  double beta = 0.4;
  ModelSpec m(12, {{motif_edge(), beta}});
  double p_star = logistic(2 * beta);
  RngStream rng(6);
  Configuration x = make_init(m, "full", rng);
  Configuration y = make_init(m, "gnp(" + std::to_string(p_star) + ")", rng);
  RunTrace tr = ergm_er_coupled_run(m, p_star, 4000, 6, x, y, 1);
  REQUIRE(tr.coalescence_step.has_value());
  const auto& ham = tr.observables.at("hamming");
  bool zero_after = true;
  for (std::size_t i = 0; i < tr.sample_times.size(); ++i)
    if (tr.sample_times[i] >= *tr.coalescence_step && ham[i] != 0.0)
      zero_after = false;
  CHECK(zero_after);  // identical update laws never create a discrepancy
}

TEST_CASE("sequential sweep resamples every edge") {
  double beta = 0.5;
  ModelSpec m(10, {{motif_edge(), beta}});
  RngStream rng(8);
  double total = 0;
  int sweeps = 400;
  Configuration x(10);
  for (int s = 0; s < sweeps; ++s) {
    x = sequential_sweep(m, x, rng);
    total += static_cast<double>(x.edge_count());
  }
  double density = total / (sweeps * num_edges(10));
  CHECK_THAT(density, Catch::Matchers::WithinAbs(logistic(2 * beta), 0.02));

  // coupled against Bernoulli(p*): same law, zero discrepancies
  RngStream rng2(8);
  auto res = sequential_sweep_coupled(m, Configuration(10),
                                      Configuration::complete(10),
                                      logistic(2 * beta), rng2);
  CHECK(res.discrepancies == 0);
  CHECK(res.x == res.y);
}
