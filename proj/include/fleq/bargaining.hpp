#pragma once

#include <utility>

#include "fleq/aggregator.hpp"
#include "fleq/equilibrium.hpp"
#include "fleq/model.hpp"
#include "fleq/numerics.hpp"

namespace fleq {

// Split of the per-stage coalition surplus negotiated over the transfer
// family.  Utilities are shares of the joint stage profit, so disagreement
// (no trade) sits at (0, 0) and the shares sum to one when feasible.
struct BargainOutcome {
  bool feasible = false;
  double theta_star = 0.0;
  Vector tariff;
  double utility_storage = 0.0;
  double utility_aggregator = 0.0;
  IntervalSet region = IntervalSet::none();
  double joint_per_stage = 0.0;
};

// Shares (storage, aggregator) of the joint stage profit at transfer theta.
// Throws NoSurplus when there is nothing to split.
std::pair<double, double> normalized_utilities(double theta, double joint_per_stage);

// Maximizer of the bargaining product over a closed interval union.  The
// product is concave in theta, so each part contributes its point closest to
// the unconstrained peak; ties resolve toward the smaller transfer.
double project_theta_to_region(double theta_peak, const IntervalSet& region);

// Symmetric Nash solution over the self-enforcing transfers for storage i.
BargainOutcome nash_bargain(Eigen::Index i, const GcSolution& gc,
                            const MarketParams& market, const Fleet& fleet,
                            const RepeatedGameParams& params, const TariffBounds& bounds);

}  // namespace fleq
