#pragma once

#include <vector>

#include "fleq/equilibrium.hpp"
#include "fleq/model.hpp"

namespace fleq {

// Per-period artificial cost g_it(x) = (a(i,t)/2) x^2 + b(i,t) x, charged on
// top of each storage's true cost to steer the equilibrium onto the
// coalition optimum. Revenue-neutral at the target schedule.
struct AcfSet {
  Matrix a;
  Matrix b;
};

// Periods where the coalition target buys (t1) versus sells or sits idle
// (t2). Membership follows the base price against the z-weighted mean price,
// strictly below for t1; ties go to t2.
struct PeriodPartition {
  std::vector<Eigen::Index> t1;
  std::vector<Eigen::Index> t2;
};

PeriodPartition period_partition(const MarketParams& market, const Fleet& fleet);

// Pair-convention coefficients of the two-period design. Deliberately takes
// only the aggregates a storage can know without seeing anyone's book: its
// own slope, the effective market slope, and the fleet sum of 1/eps.
struct PairCoefficients {
  double a;
  double b;
};

PairCoefficients acf_pair_coefficients(double eps_i, double gamma_eff,
                                       double sum_inv_eps);

// Two-period synthesis. The pair linear term splits evenly across the two
// periods (+b/2, -b/2 on the buy/sell legs), which keeps each period
// revenue-neutral at the target.
AcfSet acf_two_period(double gamma_eff, const Fleet& fleet);

// General synthesis through the stacked linear system in (d, b, lambda);
// quadratic terms are recovered from a_it = -2 b_it / d_it. Throws
// DegeneratePeriod when the coalition target never trades.
AcfSet acf_multi_period(const MarketParams& market, const Fleet& fleet);

// Closed-form synthesis from broadcast aggregates, which may be estimates:
// a_it = 2 gamma_t (eps_i S - 1), b_it = -gamma_t d_it (eps_i S - 1) with the
// target recomputed from the believed parameters. Coincides with
// acf_multi_period when the beliefs are exact.
AcfSet acf_from_estimates(const MarketParams& market, const Fleet& fleet,
                          const Vector& gamma_believed, double sum_inv_eps_believed);

// Realized surcharge revenue g_it(d_it) per storage and period.
Matrix revenue_neutrality_check(const AcfSet& acf, const Schedule& sched);

enum class MisestimatedParameter { kSumInvEps, kGamma };

struct SensitivityResult {
  double profit_true_acf;
  double profit_misestimated_acf;
  double profit_gc;
  double profit_ne;
};

// Designs the surcharge once with exact aggregates and once with the chosen
// aggregate scaled by (1 + rel_error); only the design sees the wrong value,
// every equilibrium and profit is evaluated on the true market.
SensitivityResult sensitivity_experiment(const MarketParams& market, const Fleet& fleet,
                                         MisestimatedParameter which, double rel_error);

}  // namespace fleq
