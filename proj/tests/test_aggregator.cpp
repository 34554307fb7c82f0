#include <cmath>

#include <doctest.h>

#include "fleq/aggregator.hpp"
#include "fleq/equilibrium.hpp"
#include "fleq/errors.hpp"
#include "fleq/rng.hpp"
#include "oracles.hpp"

using namespace fleq;

namespace {

struct CanonicalGame {
  MarketParams market = two_period_market(1.0);
  Fleet fleet{Vector::Ones(2)};
  GcSolution gc = gc_closed_form(market, fleet);
  TariffBounds bounds{-1.0, 1.0};
  RepeatedGameParams params{0.95};
};

Vector pair(double first, double second) {
  Vector v(2);
  v << first, second;
  return v;
}

}  // namespace

TEST_CASE("parameter guards") {
  CHECK_THROWS_AS(TariffBounds(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(RepeatedGameParams(0.0), std::invalid_argument);
  CHECK_THROWS_AS(RepeatedGameParams(1.0), std::invalid_argument);
  CHECK_THROWS_AS(DefectTime::at(-1), std::invalid_argument);
  CHECK(DefectTime::never().is_never);
  CHECK_THROWS_AS(Tariff(Matrix::Constant(1, 2, 2.0), TariffBounds(-1.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("storage response to a tariff") {
  const Fleet fleet(pair(1.0, 2.0));

  // only deviations of the tariff from its own mean move energy
  const Vector br = storage_best_response_to_tariff(0, pair(7.0 / 24.0, 17.0 / 24.0), fleet);
  CHECK(std::abs(br[0] - 5.0 / 24.0) <= 1e-15);
  CHECK(std::abs(br[1] + 5.0 / 24.0) <= 1e-15);

  const Vector lazy = storage_best_response_to_tariff(1, pair(0.2, 0.8), fleet);
  CHECK(std::abs(lazy[0] - 0.15) <= 1e-15);

  CHECK(storage_best_response_to_tariff(0, Vector::Constant(4, 0.3), fleet)
            .cwiseAbs()
            .maxCoeff() <= 1e-15);

  SplitMix64 rng(53);
  for (int rep = 0; rep < 30; ++rep) {
    Vector tau(5);
    for (Eigen::Index t = 0; t < 5; ++t) tau[t] = rng.uniform(-1.0, 1.0);
    const Vector d = storage_best_response_to_tariff(0, tau, fleet);
    CHECK(std::abs(d.sum()) <= 1e-12);
    // stationarity: tau_t + eps d_t constant across periods
    const Vector grad = tau + d;
    CHECK(grad.maxCoeff() - grad.minCoeff() <= 1e-12);
  }
}

TEST_CASE("defection tariff is bang-bang") {
  const TariffBounds bounds(-1.0, 1.0);
  const Vector tau = aggregator_defection_tariff(pair(1.0 / 6.0, -1.0 / 6.0), bounds);
  CHECK(tau[0] == 1.0);
  CHECK(tau[1] == -1.0);

  Vector idle(3);
  idle << 0.5, 0.0, -0.5;
  const Vector mixed = aggregator_defection_tariff(idle, TariffBounds(0.0, 4.0));
  CHECK(mixed[0] == 4.0);
  CHECK(mixed[1] == 2.0);  // indifferent period settles at the midpoint
  CHECK(mixed[2] == 0.0);
}

TEST_CASE("single-shot equilibrium check") {
  const Fleet fleet(Vector::Ones(2));
  const TariffBounds bounds(-1.0, 1.0);

  // any constant tariff with zero trade passes
  CHECK(singleshot_equilibrium_check(pair(0.0, 0.0), pair(0.0, 0.0), fleet, 0, bounds));
  CHECK(singleshot_equilibrium_check(pair(0.3, 0.3), pair(0.0, 0.0), fleet, 1, bounds));

  // trading profiles fail: the response matches but the re-pricing does not
  CHECK(!singleshot_equilibrium_check(pair(1.0, -1.0), pair(-1.0, 1.0), fleet, 0, bounds));
  CHECK(!singleshot_equilibrium_check(pair(0.0, 1.0), pair(0.5, -0.5), fleet, 0, bounds));

  // off the best response entirely
  CHECK(!singleshot_equilibrium_check(pair(0.0, 0.0), pair(0.5, -0.5), fleet, 0, bounds));
  // outside the box
  CHECK(!singleshot_equilibrium_check(pair(2.0, 2.0), pair(0.0, 0.0), fleet, 0, bounds));
}

TEST_CASE("alternating play settles on zero trade") {
  const Fleet fleet(pair(1.0, 0.5));
  const TariffBounds bounds(-1.0, 1.0);
  SplitMix64 rng(59);
  for (int rep = 0; rep < 100; ++rep) {
    Vector tau(2), d(2);
    for (Eigen::Index t = 0; t < 2; ++t) {
      tau[t] = rng.uniform(-1.0, 1.0);
      d[t] = rng.uniform(-2.0, 2.0);
    }
    const Eigen::Index who = static_cast<Eigen::Index>(rng.next_u64() % 2);
    const BrDynamicsResult rest = br_dynamics(who, tau, d, fleet, bounds);
    CHECK(rest.d.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(rest.rounds <= 3);
    CHECK(singleshot_equilibrium_check(rest.tau, rest.d, fleet, who, bounds));
  }
}

TEST_CASE("transfer tariffs move along the schedule direction") {
  const CanonicalGame g;

  const Vector passthrough = transfer_tariff(0, 0.0, g.gc, g.market, g.bounds);
  CHECK(std::abs(passthrough[0] - 1.0 / 6.0) <= 1e-15);
  CHECK(std::abs(passthrough[1] - 5.0 / 6.0) <= 1e-15);

  const Vector deal = transfer_tariff(0, 1.0 / 24.0, g.gc, g.market, g.bounds);
  CHECK(std::abs(deal[0] - 7.0 / 24.0) <= 1e-14);
  CHECK(std::abs(deal[1] - 17.0 / 24.0) <= 1e-14);

  const Vector agg_floor = transfer_tariff(0, 1.0 / 45.0, g.gc, g.market, g.bounds);
  CHECK(std::abs((agg_floor[1] - agg_floor[0]) - 8.0 / 15.0) <= 1e-14);

  const Interval box = feasible_theta_box(0, g.gc, g.market, g.bounds);
  CHECK(std::abs(box.lo + 1.0 / 18.0) <= 1e-14);
  CHECK(std::abs(box.hi - 5.0 / 18.0) <= 1e-14);

  try {
    transfer_tariff(0, 0.4, g.gc, g.market, g.bounds);
    FAIL("expected BoxViolation");
  } catch (const BoxViolation& e) {
    CHECK(std::abs(e.theta_lo - box.lo) <= 1e-14);
    CHECK(std::abs(e.theta_hi - box.hi) <= 1e-14);
  }
}

TEST_CASE("long-term profit accounting") {
  const CanonicalGame g;
  const Vector deal = transfer_tariff(0, 1.0 / 24.0, g.gc, g.market, g.bounds);

  SUBCASE("perpetual cooperation splits 5/3 equally at theta = 1/24") {
    const LongtermProfits run =
        longterm_profits(0, deal, g.gc, g.market, g.fleet, g.params,
                         DefectTime::never(), DefectTime::never(), g.bounds);
    CHECK(std::abs(run.storage - 5.0 / 6.0) <= 1e-12);
    CHECK(std::abs(run.aggregator - 5.0 / 6.0) <= 1e-12);
  }

  SUBCASE("storage defection at stage zero earns the one-shot response value") {
    const LongtermProfits run =
        longterm_profits(0, deal, g.gc, g.market, g.fleet, g.params,
                         DefectTime::at(0), DefectTime::never(), g.bounds);
    CHECK(std::abs(run.storage - 25.0 / 576.0) <= 1e-12);
  }

  SUBCASE("aggregator defection at stage zero earns the bang-bang value") {
    const LongtermProfits run =
        longterm_profits(0, deal, g.gc, g.market, g.fleet, g.params,
                         DefectTime::never(), DefectTime::at(0), g.bounds);
    CHECK(std::abs(run.aggregator - 4.0 / 9.0) <= 1e-12);
  }

  SUBCASE("deferred defection discounts the final stage") {
    const LongtermProfits coop =
        longterm_profits(0, deal, g.gc, g.market, g.fleet, g.params,
                         DefectTime::never(), DefectTime::never(), g.bounds);
    const LongtermProfits late =
        longterm_profits(0, deal, g.gc, g.market, g.fleet, g.params,
                         DefectTime::at(2), DefectTime::never(), g.bounds);
    const double coop_stage = (1.0 - 0.95) * coop.storage;
    const double defect_stage = 25.0 / 576.0;
    const double expected =
        coop_stage * (1.0 + 0.95) + 0.95 * 0.95 * defect_stage;
    CHECK(std::abs(late.storage - expected) <= 1e-12);
  }

  SUBCASE("simultaneous defection plays response against re-pricing") {
    const LongtermProfits clash =
        longterm_profits(0, deal, g.gc, g.market, g.fleet, g.params,
                         DefectTime::at(0), DefectTime::at(0), g.bounds);
    // response to the committed tariff, priced at the punishment tariff
    const Vector d = storage_best_response_to_tariff(0, deal, g.fleet);
    const Vector punish = aggregator_defection_tariff(g.gc.sched.row(0).transpose(), g.bounds);
    const double expected = -punish.dot(d) - 0.5 * d.squaredNorm();
    CHECK(std::abs(clash.storage - expected) <= 1e-12);
  }
}

TEST_CASE("sustainability thresholds") {
  const CanonicalGame g;
  const Vector row = g.gc.sched.row(0).transpose();
  const Vector direction = row / row.squaredNorm();
  const Vector& p = g.gc.report.per_period_price;

  // storage cooperates only up to the quadratic root near theta = 0.082977
  const double storage_root = 0.0829771494232;
  CHECK(sustainable_storage(0, p + (storage_root - 1e-6) * direction, g.gc, g.fleet, g.params));
  CHECK(!sustainable_storage(0, p + (storage_root + 1e-6) * direction, g.gc, g.fleet, g.params));

  // aggregator cooperates only from theta = 1/45 upward
  const double agg_root = 1.0 / 45.0;
  CHECK(sustainable_aggregator(0, p + (agg_root + 1e-6) * direction, g.gc, g.market, g.fleet,
                               g.params, g.bounds));
  CHECK(!sustainable_aggregator(0, p + (agg_root - 1e-6) * direction, g.gc, g.market, g.fleet,
                                g.params, g.bounds));
}

TEST_CASE("cooperation region on the canonical scenario") {
  const CanonicalGame g;
  const CooperationRegion region =
      cooperation_region_theta(0, g.gc, g.market, g.fleet, g.params, g.bounds);

  REQUIRE(region.theta.parts().size() == 1);
  const Interval part = region.theta.parts()[0];
  CHECK(std::abs(part.lo - 1.0 / 45.0) <= 1e-9);
  CHECK(std::abs(part.hi - 0.0829771494232182) <= 1e-9);

  REQUIRE(region.storage_ok.parts().size() == 1);
  CHECK(std::abs(region.storage_ok.parts()[0].lo + 2.08297714942) <= 1e-9);
  CHECK(std::abs(region.box.lo + 1.0 / 18.0) <= 1e-12);
  CHECK(std::abs(region.box.hi - 5.0 / 18.0) <= 1e-12);
}

TEST_CASE("region membership matches the sustainability predicates") {
  SplitMix64 rng(61);
  for (int rep = 0; rep < 10; ++rep) {
    const auto [market, fleet] = oracle::random_instance(rng, 5, 6);
    const GcSolution gc = gc_closed_form(market, fleet);
    const double price_span = gc.report.per_period_price.cwiseAbs().maxCoeff();
    const TariffBounds bounds(-1.5 * price_span - 1.0, 1.5 * price_span + 1.0);
    const RepeatedGameParams params(rng.uniform(0.7, 0.99));

    const CooperationRegion region =
        cooperation_region_theta(0, gc, market, fleet, params, bounds);
    const Interval box = feasible_theta_box(0, gc, market, bounds);
    REQUIRE(!box.empty());

    const Vector row = gc.sched.row(0).transpose();
    const Vector direction = row / row.squaredNorm();
    for (int k = 0; k <= 60; ++k) {
      const double theta = box.lo + (box.hi - box.lo) * k / 60.0;
      const Vector tau = gc.report.per_period_price + theta * direction;
      const bool wants = sustainable_storage(0, tau, gc, fleet, params) &&
                         sustainable_aggregator(0, tau, gc, market, fleet, params, bounds);
      // skip points within fp reach of a boundary
      const bool inside = region.theta.contains(theta, 1e-9);
      const bool outside = !region.theta.contains(theta, -1e-9);
      if (inside && outside) continue;
      CHECK(wants == inside);
    }
  }
}
