#pragma once

#include "fleq/model.hpp"
#include "fleq/numerics.hpp"

namespace fleq {

struct AcfSet;

// A coalition optimum: schedule, per-storage budget multipliers, profits.
struct GcSolution {
  Schedule sched;
  Vector lambda;
  ProfitReport report;
};

struct NeSolution {
  Schedule sched;
  Vector lambda;
  ProfitReport report;
};

// Joint profit maximum of the fleet, in closed form.
GcSolution gc_closed_form(const MarketParams& market, const Fleet& fleet);

// The same optimum through the assembled stationarity-plus-budget system;
// agrees with the closed form to solver tolerance.
GcSolution gc_solve_kkt(const MarketParams& market, const Fleet& fleet);

// Nash equilibrium of the two-period convention under a single effective
// slope. The eps overload admits zero entries (costless storages); this is
// the only entry point that does.
NeSolution ne_closed_form_two_period(double gamma_eff, const Vector& eps);
NeSolution ne_closed_form_two_period(double gamma_eff, const Fleet& fleet);

// Nash equilibrium of the general game, optionally under a per-period
// surcharge set. Reported profits are always true market profits.
NeSolution ne_solve(const MarketParams& market, const Fleet& fleet,
                    const AcfSet* acf = nullptr);

// Largest profit any storage can still gain by deviating from `sched` while
// the others hold; near zero certifies an equilibrium. The surcharge, when
// given, is part of each storage's objective.
double verify_equilibrium(const Schedule& sched, const MarketParams& market,
                          const Fleet& fleet, const AcfSet* acf = nullptr);

}  // namespace fleq
