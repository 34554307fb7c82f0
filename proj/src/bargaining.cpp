#include "fleq/bargaining.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fleq/errors.hpp"

namespace fleq {

std::pair<double, double> normalized_utilities(double theta, double joint_per_stage) {
  if (!(joint_per_stage > 0.0))
    throw NoSurplus("joint stage profit leaves nothing to split");
  const double agg = theta / joint_per_stage;
  return {1.0 - agg, agg};
}

double project_theta_to_region(double theta_peak, const IntervalSet& region) {
  if (region.parts().empty())
    throw std::invalid_argument("cannot project onto an empty region");

  auto product = [theta_peak](double theta) {
    // Up to a positive scale the bargaining product is theta*(2*peak - theta).
    return theta * (2.0 * theta_peak - theta);
  };

  bool found = false;
  double best = 0.0;
  double best_value = 0.0;
  for (const Interval& part : region.parts()) {
    const double candidate = std::clamp(theta_peak, part.lo, part.hi);
    if (!std::isfinite(candidate)) continue;
    const double value = product(candidate);
    if (!found || value > best_value ||
        (value == best_value && candidate < best)) {
      found = true;
      best = candidate;
      best_value = value;
    }
  }
  if (!found) throw std::invalid_argument("region has no finite point");
  return best;
}

BargainOutcome nash_bargain(Eigen::Index i, const GcSolution& gc,
                            const MarketParams& market, const Fleet& fleet,
                            const RepeatedGameParams& params, const TariffBounds& bounds) {
  if (i < 0 || i >= fleet.size()) throw std::invalid_argument("storage index out of range");
  const Vector row = gc.sched.row(i).transpose();
  const double joint =
      -gc.report.per_period_price.dot(row) - 0.5 * fleet.eps[i] * row.squaredNorm();
  if (!(joint > 0.0)) throw NoSurplus("joint stage profit leaves nothing to split");

  BargainOutcome out;
  out.joint_per_stage = joint;
  out.region = cooperation_region_theta(i, gc, market, fleet, params, bounds).theta;
  if (out.region.parts().empty()) return out;

  out.theta_star = project_theta_to_region(0.5 * joint, out.region);
  out.tariff = transfer_tariff(i, out.theta_star, gc, market, bounds);
  std::tie(out.utility_storage, out.utility_aggregator) =
      normalized_utilities(out.theta_star, joint);
  out.feasible = true;
  return out;
}

}  // namespace fleq
