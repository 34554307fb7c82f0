#include "fleq/aggregator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fleq/errors.hpp"

namespace fleq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieSlack = 1e-12;  // indifference cooperates

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

double stage_storage_profit(const Vector& tariff, const Vector& d, double eps_i) {
  return -tariff.dot(d) - 0.5 * eps_i * d.squaredNorm();
}

double stage_aggregator_profit(const Vector& tariff, const Vector& d, const Vector& prices) {
  return (tariff - prices).dot(d);
}

Vector prices_with_row(const GcSolution& gc, Eigen::Index i, const Vector& row,
                       const MarketParams& market) {
  Vector p(market.periods());
  for (Eigen::Index t = 0; t < market.periods(); ++t) {
    const double total = gc.sched.col(t).sum() - gc.sched(i, t) + row[t];
    p[t] = market.beta[t] + market.gamma[t] * total;
  }
  return p;
}

void check_stage_inputs(Eigen::Index i, const Vector& tariff, const GcSolution& gc,
                        const MarketParams& market, const Fleet& fleet) {
  require(i >= 0 && i < fleet.size(), "storage index out of range");
  require(tariff.size() == market.periods(), "tariff size mismatch");
  require(gc.sched.rows() == fleet.size() && gc.sched.cols() == market.periods(),
          "solution dimensions mismatch");
}

}  // namespace

TariffBounds::TariffBounds(double lo, double hi) : tau_min(lo), tau_max(hi) {
  require(std::isfinite(lo) && std::isfinite(hi), "tariff bounds must be finite");
  require(lo <= hi, "tariff bounds are inverted");
}

Tariff::Tariff(Matrix tau_in, TariffBounds bounds_in)
    : tau(std::move(tau_in)), bounds(bounds_in) {
  require((tau.array() >= bounds.tau_min).all() && (tau.array() <= bounds.tau_max).all(),
          "tariff leaves its box");
}

RepeatedGameParams::RepeatedGameParams(double delta_in) : delta(delta_in) {
  require(std::isfinite(delta) && delta > 0.0 && delta < 1.0,
          "discount factor must lie strictly inside (0, 1)");
}

DefectTime DefectTime::at(std::int64_t stage) {
  if (stage < 0) throw std::invalid_argument("defection stage must be nonnegative");
  DefectTime d;
  d.is_never = false;
  d.stage = stage;
  return d;
}

Vector storage_best_response_to_tariff(Eigen::Index i, const Vector& tariff,
                                       const Fleet& fleet) {
  require(i >= 0 && i < fleet.size(), "storage index out of range");
  require(tariff.size() >= 2, "tariff needs at least two periods");
  return (Vector::Constant(tariff.size(), tariff.mean()) - tariff) / fleet.eps[i];
}

Vector aggregator_defection_tariff(const Vector& committed, const TariffBounds& bounds) {
  Vector tau(committed.size());
  for (Eigen::Index t = 0; t < committed.size(); ++t) {
    if (committed[t] > 0.0)
      tau[t] = bounds.tau_max;
    else if (committed[t] < 0.0)
      tau[t] = bounds.tau_min;
    else
      tau[t] = bounds.midpoint();
  }
  return tau;
}

bool singleshot_equilibrium_check(const Vector& tariff, const Vector& sched_row,
                                  const Fleet& fleet, Eigen::Index i,
                                  const TariffBounds& bounds, double tol) {
  require(tariff.size() == sched_row.size(), "tariff and schedule sizes differ");
  if (!((tariff.array() >= bounds.tau_min - tol).all() &&
        (tariff.array() <= bounds.tau_max + tol).all()))
    return false;

  const Vector br = storage_best_response_to_tariff(i, tariff, fleet);
  if ((sched_row - br).cwiseAbs().maxCoeff() > tol) return false;

  // Against a nonzero schedule only the bang-bang re-pricing is optimal.
  for (Eigen::Index t = 0; t < sched_row.size(); ++t) {
    if (sched_row[t] > tol && std::abs(tariff[t] - bounds.tau_max) > tol) return false;
    if (sched_row[t] < -tol && std::abs(tariff[t] - bounds.tau_min) > tol) return false;
  }
  return true;
}

BrDynamicsResult br_dynamics(Eigen::Index i, const Vector& tau0, const Vector& d0,
                             const Fleet& fleet, const TariffBounds& bounds,
                             int max_rounds) {
  require(tau0.size() == d0.size(), "start profile sizes differ");
  require(tau0.size() >= 2, "need at least two periods");

  Vector tau = tau0;
  Vector d = d0;
  for (int round = 1; round <= max_rounds; ++round) {
    // A candidate trade is kept only if it stays profitable once the
    // aggregator re-prices it; zero trade is always worth exactly zero.
    Vector candidate = storage_best_response_to_tariff(i, tau, fleet);
    const Vector repriced = aggregator_defection_tariff(candidate, bounds);
    Vector d_next = stage_storage_profit(repriced, candidate, fleet.eps[i]) > 0.0
                        ? candidate
                        : Vector::Zero(tau.size()).eval();
    Vector tau_next = aggregator_defection_tariff(d_next, bounds);

    const bool settled = (d_next - d).cwiseAbs().maxCoeff() == 0.0 &&
                         (tau_next - tau).cwiseAbs().maxCoeff() == 0.0;
    d = std::move(d_next);
    tau = std::move(tau_next);
    if (settled) return {tau, d, round};
  }
  throw NonConvergence("tariff play failed to settle");
}

Interval feasible_theta_box(Eigen::Index i, const GcSolution& gc,
                            const MarketParams& market, const TariffBounds& bounds) {
  require(i >= 0 && i < gc.sched.rows(), "storage index out of range");
  const Vector row = gc.sched.row(i).transpose();
  const double sumsq = row.squaredNorm();
  require(sumsq > 0.0, "transfer family needs a trading target");
  const Vector& p = gc.report.per_period_price;

  Interval box{-kInf, kInf};
  for (Eigen::Index t = 0; t < market.periods(); ++t) {
    const double u = row[t] / sumsq;
    if (u > 0.0) {
      box.lo = std::max(box.lo, (bounds.tau_min - p[t]) / u);
      box.hi = std::min(box.hi, (bounds.tau_max - p[t]) / u);
    } else if (u < 0.0) {
      box.lo = std::max(box.lo, (bounds.tau_max - p[t]) / u);
      box.hi = std::min(box.hi, (bounds.tau_min - p[t]) / u);
    } else if (p[t] < bounds.tau_min || p[t] > bounds.tau_max) {
      return {kInf, -kInf};
    }
  }
  return box;
}

Vector transfer_tariff(Eigen::Index i, double theta, const GcSolution& gc,
                       const MarketParams& market, const TariffBounds& bounds) {
  require(std::isfinite(theta), "theta must be finite");
  require(i >= 0 && i < gc.sched.rows(), "storage index out of range");
  const Vector row = gc.sched.row(i).transpose();
  const double sumsq = row.squaredNorm();
  require(sumsq > 0.0, "transfer family needs a trading target");

  Vector tau = gc.report.per_period_price + (theta / sumsq) * row;
  if ((tau.array() < bounds.tau_min).any() || (tau.array() > bounds.tau_max).any()) {
    const Interval ok = feasible_theta_box(i, gc, market, bounds);
    throw BoxViolation("transfer tariff leaves its box", ok.lo, ok.hi);
  }
  return tau;
}

LongtermProfits longterm_profits(Eigen::Index i, const Vector& tariff,
                                 const GcSolution& gc, const MarketParams& market,
                                 const Fleet& fleet, const RepeatedGameParams& params,
                                 DefectTime storage_defects, DefectTime aggregator_defects,
                                 const TariffBounds& bounds) {
  check_stage_inputs(i, tariff, gc, market, fleet);

  const Vector coop_d = gc.sched.row(i).transpose();
  const double pi_s_coop = stage_storage_profit(tariff, coop_d, fleet.eps[i]);
  const double pi_a_coop =
      stage_aggregator_profit(tariff, coop_d, gc.report.per_period_price);

  const double delta = params.delta;
  if (storage_defects.is_never && aggregator_defects.is_never)
    return {pi_s_coop / (1.0 - delta), pi_a_coop / (1.0 - delta)};

  std::int64_t m = std::numeric_limits<std::int64_t>::max();
  if (!storage_defects.is_never) m = std::min(m, storage_defects.stage);
  if (!aggregator_defects.is_never) m = std::min(m, aggregator_defects.stage);

  const bool s_now = !storage_defects.is_never && storage_defects.stage == m;
  const bool a_now = !aggregator_defects.is_never && aggregator_defects.stage == m;

  const Vector d_action =
      s_now ? storage_best_response_to_tariff(i, tariff, fleet) : coop_d;
  const Vector tau_action = a_now ? aggregator_defection_tariff(coop_d, bounds) : tariff;

  const Vector p_stage = prices_with_row(gc, i, d_action, market);
  const double pi_s_stage = stage_storage_profit(tau_action, d_action, fleet.eps[i]);
  const double pi_a_stage = stage_aggregator_profit(tau_action, d_action, p_stage);

  const double discount_m = std::pow(delta, static_cast<double>(m));
  const double run = (1.0 - discount_m) / (1.0 - delta);
  return {run * pi_s_coop + discount_m * pi_s_stage,
          run * pi_a_coop + discount_m * pi_a_stage};
}

bool sustainable_storage(Eigen::Index i, const Vector& tariff, const GcSolution& gc,
                         const Fleet& fleet, const RepeatedGameParams& params) {
  require(i >= 0 && i < fleet.size(), "storage index out of range");
  require(tariff.size() == gc.sched.cols(), "tariff size mismatch");
  const Vector coop_d = gc.sched.row(i).transpose();
  const Vector defect_d = storage_best_response_to_tariff(i, tariff, fleet);
  const double pi_coop = stage_storage_profit(tariff, coop_d, fleet.eps[i]);
  const double pi_defect = stage_storage_profit(tariff, defect_d, fleet.eps[i]);
  return (1.0 - params.delta) * pi_defect <= pi_coop + kTieSlack;
}

bool sustainable_aggregator(Eigen::Index i, const Vector& tariff, const GcSolution& gc,
                            const MarketParams& market, const Fleet& fleet,
                            const RepeatedGameParams& params, const TariffBounds& bounds) {
  check_stage_inputs(i, tariff, gc, market, fleet);
  const Vector coop_d = gc.sched.row(i).transpose();
  const Vector& p = gc.report.per_period_price;
  const double pi_coop = stage_aggregator_profit(tariff, coop_d, p);
  const Vector defect_tau = aggregator_defection_tariff(coop_d, bounds);
  const double pi_defect = stage_aggregator_profit(defect_tau, coop_d, p);
  return pi_coop >= (1.0 - params.delta) * pi_defect - kTieSlack;
}

CooperationRegion cooperation_region_theta(Eigen::Index i, const GcSolution& gc,
                                           const MarketParams& market, const Fleet& fleet,
                                           const RepeatedGameParams& params,
                                           const TariffBounds& bounds) {
  check_stage_inputs(i, Vector::Zero(market.periods()), gc, market, fleet);
  const Vector row = gc.sched.row(i).transpose();
  const double sumsq = row.squaredNorm();
  require(sumsq > 0.0, "transfer family needs a trading target");

  const Vector& p = gc.report.per_period_price;
  const Vector u = row / sumsq;
  const double eps_i = fleet.eps[i];
  const double hold = 1.0 - params.delta;

  // Cooperative stage profit along the family is pi0 - theta; a defecting
  // storage earns the tariff's centered energy, quadratic in theta.
  const double pi0 = -p.dot(row) - 0.5 * eps_i * sumsq;
  const Vector pc = p.array() - p.mean();
  const Vector uc = u.array() - u.mean();
  const double qa = pc.squaredNorm();
  const double qb = pc.dot(uc);
  const double qc = uc.squaredNorm();

  CooperationRegion region;
  region.storage_ok = solve_quadratic_le_zero(hold * qc / (2.0 * eps_i),
                                              hold * qb / eps_i + 1.0,
                                              hold * qa / (2.0 * eps_i) - pi0);

  const Vector defect_tau = aggregator_defection_tariff(row, bounds);
  const double pi_a_defect = stage_aggregator_profit(defect_tau, row, p);
  region.aggregator_ok = IntervalSet::of(hold * pi_a_defect, kInf);

  region.box = feasible_theta_box(i, gc, market, bounds);
  IntervalSet box_set =
      region.box.empty() ? IntervalSet::none() : IntervalSet::of(region.box.lo, region.box.hi);

  region.theta = region.storage_ok.intersect(region.aggregator_ok).intersect(box_set);
  return region;
}

}  // namespace fleq
