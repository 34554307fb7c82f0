#pragma once

#include <cstdint>

#include "fleq/equilibrium.hpp"
#include "fleq/model.hpp"
#include "fleq/numerics.hpp"

namespace fleq {

// Common box every tariff component must stay inside.
struct TariffBounds {
  double tau_min;
  double tau_max;

  TariffBounds(double lo, double hi);
  double midpoint() const { return 0.5 * (tau_min + tau_max); }
};

// Per-storage tariff rows together with their box.
struct Tariff {
  Matrix tau;
  TariffBounds bounds;

  Tariff(Matrix tau_in, TariffBounds bounds_in);
};

struct RepeatedGameParams {
  double delta;

  explicit RepeatedGameParams(double delta_in);
};

// A stage index in {0, 1, ...} or never.
struct DefectTime {
  static DefectTime never() { return DefectTime{}; }
  static DefectTime at(std::int64_t stage);

  bool is_never = true;
  std::int64_t stage = 0;
};

struct LongtermProfits {
  double storage;
  double aggregator;
};

struct BrDynamicsResult {
  Vector tau;
  Vector d;
  int rounds;
};

// Cooperation region along the transfer-tariff family, in theta units.
struct CooperationRegion {
  IntervalSet theta;  // storage, aggregator and box cuts intersected
  IntervalSet storage_ok;
  IntervalSet aggregator_ok;
  Interval box;

  bool empty() const { return theta.empty(); }
};

// Facing per-period purchase prices tau, storage i buys where the tariff sits
// below its own mean: d_t = (mean(tau) - tau_t) / eps_i.
Vector storage_best_response_to_tariff(Eigen::Index i, const Vector& tariff,
                                       const Fleet& fleet);

// The aggregator's most profitable re-pricing of a committed schedule:
// tau_max where it buys, tau_min where it sells, the box midpoint where idle.
Vector aggregator_defection_tariff(const Vector& committed, const TariffBounds& bounds);

// True iff the pair is mutually best-responding within tol.
bool singleshot_equilibrium_check(const Vector& tariff, const Vector& sched_row,
                                  const Fleet& fleet, Eigen::Index i,
                                  const TariffBounds& bounds, double tol = 1e-9);

// Alternating play in which the storage evaluates a candidate trade against
// the re-pricing it would provoke, keeping it only if it stays profitable.
// A round-trip priced at tau_max up and tau_min down never recovers its cost,
// so trades collapse to zero from any start.
BrDynamicsResult br_dynamics(Eigen::Index i, const Vector& tau0, const Vector& d0,
                             const Fleet& fleet, const TariffBounds& bounds,
                             int max_rounds = 64);

// Transfer family tau(theta) = p(d*) + theta * d_i* / ||d_i*||^2; the
// aggregator's per-stage take is exactly theta. Throws BoxViolation when a
// component leaves the box, reporting the theta range that stays inside.
Vector transfer_tariff(Eigen::Index i, double theta, const GcSolution& gc,
                       const MarketParams& market, const TariffBounds& bounds);

// Theta range the box admits for storage i's transfer family.
Interval feasible_theta_box(Eigen::Index i, const GcSolution& gc,
                            const MarketParams& market, const TariffBounds& bounds);

// Discounted sums under grim trigger: cooperate until one's defection stage,
// a defector plays its defection move against the opponent's committed
// action, and both earn the zero-profit stage equilibrium forever after.
LongtermProfits longterm_profits(Eigen::Index i, const Vector& tariff,
                                 const GcSolution& gc, const MarketParams& market,
                                 const Fleet& fleet, const RepeatedGameParams& params,
                                 DefectTime storage_defects, DefectTime aggregator_defects,
                                 const TariffBounds& bounds);

// Storage i keeps cooperating iff one defection stage cannot beat the
// cooperative stream: (1 - delta) pi_defect <= pi_coop, ties cooperate.
bool sustainable_storage(Eigen::Index i, const Vector& tariff, const GcSolution& gc,
                         const Fleet& fleet, const RepeatedGameParams& params);

// Same test on the aggregator's side, against its bang-bang re-pricing.
bool sustainable_aggregator(Eigen::Index i, const Vector& tariff, const GcSolution& gc,
                            const MarketParams& market, const Fleet& fleet,
                            const RepeatedGameParams& params, const TariffBounds& bounds);

CooperationRegion cooperation_region_theta(Eigen::Index i, const GcSolution& gc,
                                           const MarketParams& market, const Fleet& fleet,
                                           const RepeatedGameParams& params,
                                           const TariffBounds& bounds);

}  // namespace fleq
