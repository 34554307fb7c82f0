#include <cmath>

#include <doctest.h>

#include "fleq/equilibrium.hpp"
#include "fleq/errors.hpp"
#include "fleq/rng.hpp"
#include "oracles.hpp"

using namespace fleq;

TEST_CASE("coalition closed form on the canonical scenario") {
  const MarketParams market = two_period_market(1.0);
  const Fleet fleet(Vector::Ones(2));
  const GcSolution gc = gc_closed_form(market, fleet);

  CHECK(std::abs(gc.sched(0, 0) - 1.0 / 6.0) <= 1e-15);
  CHECK(std::abs(gc.sched(1, 1) + 1.0 / 6.0) <= 1e-15);
  CHECK(std::abs(gc.lambda[0] - 0.5) <= 1e-15);
  CHECK(std::abs(gc.lambda[1] - 0.5) <= 1e-15);
  CHECK(std::abs(gc.report.aggregate - 1.0 / 6.0) <= 1e-15);
  CHECK(std::abs(gc.report.per_storage[0] - 1.0 / 12.0) <= 1e-15);
  CHECK(kkt_residual_gc(gc.sched, gc.lambda, market, fleet) <= 1e-12);
}

TEST_CASE("closed form and assembled system agree") {
  SplitMix64 rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    const auto [market, fleet] = oracle::random_instance(rng, 12, 8);
    const GcSolution direct = gc_closed_form(market, fleet);
    const GcSolution system = gc_solve_kkt(market, fleet);
    CHECK((direct.sched - system.sched).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((direct.lambda - system.lambda).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(direct.sched.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(kkt_residual_gc(direct.sched, direct.lambda, market, fleet) <= 1e-9);
  }
}

TEST_CASE("multipliers are a common market value") {
  SplitMix64 rng(29);
  for (int rep = 0; rep < 20; ++rep) {
    const auto [market, fleet] = oracle::random_instance(rng);
    const GcSolution gc = gc_closed_form(market, fleet);
    CHECK(gc.lambda.maxCoeff() - gc.lambda.minCoeff() <= 1e-10);
  }
}

TEST_CASE("competitive closed form on the canonical scenario") {
  const Fleet fleet(Vector::Ones(2));
  const NeSolution ne = ne_closed_form_two_period(1.0, fleet);
  CHECK(std::abs(ne.sched(0, 0) - 0.2) <= 1e-15);
  CHECK(std::abs(ne.sched(1, 1) + 0.2) <= 1e-15);
  CHECK(std::abs(ne.report.aggregate - 4.0 / 25.0) <= 1e-15);
  CHECK(std::abs(ne.report.per_storage[0] - 2.0 / 25.0) <= 1e-15);
  CHECK(std::abs(ne.report.per_period_price[0] - 0.2) <= 1e-15);
  CHECK(std::abs(ne.report.per_period_price[1] - 0.8) <= 1e-15);
}

TEST_CASE("competitive closed form matches the general solver") {
  SplitMix64 rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    const auto n = static_cast<Eigen::Index>(1 + rng.next_u64() % 10);
    const double gamma_eff = rng.uniform(0.05, 3.0);
    Vector eps(n);
    for (Eigen::Index i = 0; i < n; ++i) eps[i] = rng.uniform(0.05, 8.0);
    const Fleet fleet(eps);
    const MarketParams market = two_period_market(gamma_eff);

    const NeSolution direct = ne_closed_form_two_period(gamma_eff, fleet);
    const NeSolution system = ne_solve(market, fleet);
    CHECK((direct.sched - system.sched).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(direct.sched.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("costless storages in the two-period bound") {
  // with eps = 0 each storage trades 1/(gamma (1+n)) and the fleet earns
  // n/(gamma (1+n)^2); at gamma = 1 that is n/(1+n)^2
  for (Eigen::Index n : {1, 2, 7, 100}) {
    const NeSolution ne = ne_closed_form_two_period(1.0, Vector::Zero(n));
    const double nd = static_cast<double>(n);
    CHECK(std::abs(ne.sched(0, 0) - 1.0 / (1.0 + nd)) <= 1e-12);
    CHECK(std::abs(ne.report.aggregate - nd / ((1.0 + nd) * (1.0 + nd))) <= 1e-12);
  }

  const NeSolution scaled = ne_closed_form_two_period(2.0, Vector::Zero(3));
  CHECK(std::abs(scaled.sched(0, 0) - 1.0 / (2.0 * 4.0)) <= 1e-12);
}

TEST_CASE("coalition profit dominates the equilibrium profit") {
  SplitMix64 rng(37);
  for (int rep = 0; rep < 40; ++rep) {
    const auto [market, fleet] = oracle::random_instance(rng, 10, 10);
    const GcSolution gc = gc_closed_form(market, fleet);
    const NeSolution ne = ne_solve(market, fleet);
    CHECK(gc.report.aggregate >= ne.report.aggregate - 1e-9);
  }
}

TEST_CASE("identical-fleet coalition profit grows with n") {
  const MarketParams market = two_period_market(1.0);
  double previous = 0.0;
  for (Eigen::Index n = 1; n <= 200; ++n) {
    const GcSolution gc = gc_closed_form(market, Fleet(Vector::Ones(n)));
    CHECK(gc.report.aggregate >= previous - 1e-12);
    previous = gc.report.aggregate;
  }
  CHECK(previous < 0.25);
}

TEST_CASE("equilibrium certificates") {
  const MarketParams market = two_period_market(1.0);
  const Fleet fleet(Vector::Ones(2));

  SUBCASE("the competitive schedule is an equilibrium") {
    const NeSolution ne = ne_closed_form_two_period(1.0, fleet);
    CHECK(verify_equilibrium(ne.sched, market, fleet) <= 1e-8);
  }

  SUBCASE("the coalition schedule is not, without a surcharge") {
    const GcSolution gc = gc_closed_form(market, fleet);
    // deviating to the 5/24 response gains 25/288 - 1/12 = 1/288
    CHECK(verify_equilibrium(gc.sched, market, fleet) > 1e-4);
  }
}
