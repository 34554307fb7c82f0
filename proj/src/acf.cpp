#include "fleq/acf.hpp"

#include <cmath>
#include <stdexcept>

#include "fleq/errors.hpp"
#include "fleq/numerics.hpp"

namespace fleq {

namespace {

// z-weighted mean of the base prices; periods strictly below it buy.
double weighted_mean_beta(const MarketParams& market, const Fleet& fleet) {
  const double s = fleet.sum_inv_eps();
  const Vector z = Vector::Ones(market.periods()) + 2.0 * s * market.gamma;
  return (market.beta.array() / z.array()).sum() / z.cwiseInverse().sum();
}

void check_concavity(const AcfSet& acf, const MarketParams& market, const Fleet& fleet) {
  for (Eigen::Index i = 0; i < fleet.size(); ++i)
    for (Eigen::Index t = 0; t < market.periods(); ++t)
      if (!(fleet.eps[i] + market.gamma[t] + acf.a(i, t) > 0.0))
        throw std::runtime_error("surcharge breaks per-period concavity");
}

}  // namespace

PeriodPartition period_partition(const MarketParams& market, const Fleet& fleet) {
  const double mean = weighted_mean_beta(market, fleet);
  PeriodPartition part;
  for (Eigen::Index t = 0; t < market.periods(); ++t)
    (market.beta[t] < mean ? part.t1 : part.t2).push_back(t);
  return part;
}

PairCoefficients acf_pair_coefficients(double eps_i, double gamma_eff,
                                       double sum_inv_eps) {
  if (!(eps_i > 0.0 && gamma_eff > 0.0 && sum_inv_eps > 0.0))
    throw std::invalid_argument("pair coefficients need positive inputs");
  const double a = -gamma_eff * (1.0 - eps_i * sum_inv_eps);
  const double b = -a / (2.0 * eps_i * (1.0 + gamma_eff * sum_inv_eps));
  return {a, b};
}

AcfSet acf_two_period(double gamma_eff, const Fleet& fleet) {
  const Eigen::Index n = fleet.size();
  const double s = fleet.sum_inv_eps();
  AcfSet acf;
  acf.a.resize(n, 2);
  acf.b.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const PairCoefficients c = acf_pair_coefficients(fleet.eps[i], gamma_eff, s);
    acf.a(i, 0) = acf.a(i, 1) = c.a;
    acf.b(i, 0) = 0.5 * c.b;
    acf.b(i, 1) = -0.5 * c.b;
  }
  check_concavity(acf, two_period_market(gamma_eff), fleet);
  return acf;
}

AcfSet acf_multi_period(const MarketParams& market, const Fleet& fleet) {
  const Eigen::Index n = fleet.size();
  const Eigen::Index nt = market.periods();
  const GcSolution gc = gc_closed_form(market, fleet);

  if (period_partition(market, fleet).t1.empty())
    throw DegeneratePeriod("coalition target never trades; nothing to steer");

  // Unknowns: schedule block, linear-coefficient block, multipliers.
  const Eigen::Index dim = 2 * n * nt + n;
  const auto d_idx = [nt](Eigen::Index i, Eigen::Index t) { return i * nt + t; };
  const auto b_idx = [n, nt](Eigen::Index i, Eigen::Index t) { return n * nt + i * nt + t; };
  const auto l_idx = [n, nt](Eigen::Index i) { return 2 * n * nt + i; };

  Matrix a = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) {
      // Steered stationarity with a_it d_it already eliminated through
      // revenue neutrality (a d = -2b):
      // -beta + b - gamma_t D_t - (eps_i + gamma_t) d_it + lambda_i = 0.
      const Eigen::Index r1 = d_idx(i, t);
      for (Eigen::Index j = 0; j < n; ++j) a(r1, d_idx(j, t)) -= market.gamma[t];
      a(r1, d_idx(i, t)) -= fleet.eps[i] + market.gamma[t];
      a(r1, b_idx(i, t)) = 1.0;
      a(r1, l_idx(i)) = 1.0;
      rhs[r1] = market.beta[t];

      // Coalition stationarity pinning the same schedule.
      const Eigen::Index r2 = n * nt + d_idx(i, t);
      for (Eigen::Index j = 0; j < n; ++j) a(r2, d_idx(j, t)) -= 2.0 * market.gamma[t];
      a(r2, d_idx(i, t)) -= fleet.eps[i];
      a(r2, l_idx(i)) = 1.0;
      rhs[r2] = market.beta[t];
    }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) a(l_idx(i), d_idx(i, t)) = 1.0;

  const Vector x = solve_linear(a, rhs);

  Schedule dsol(n, nt);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) dsol(i, t) = x[d_idx(i, t)];
  if ((dsol - gc.sched).cwiseAbs().maxCoeff() > 1e-8)
    throw std::runtime_error("synthesis drifted off the coalition target");

  AcfSet acf;
  acf.a.resize(n, nt);
  acf.b.resize(n, nt);
  const double zero_tol = 1e-13 * std::max(1.0, gc.sched.cwiseAbs().maxCoeff());
  bool any_degenerate = false;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) {
      const double d = gc.sched(i, t);
      const double b = x[b_idx(i, t)];
      if (std::abs(d) <= zero_tol) {
        // Idle period: no revenue to cancel, leave it unsteered.
        acf.a(i, t) = 0.0;
        acf.b(i, t) = 0.0;
        any_degenerate = true;
      } else {
        acf.a(i, t) = -2.0 * b / d;
        acf.b(i, t) = b;
      }
    }

  check_concavity(acf, market, fleet);

  if (any_degenerate) {
    const NeSolution check = ne_solve(market, fleet, &acf);
    if ((check.sched - gc.sched).cwiseAbs().maxCoeff() > 1e-8)
      throw DegeneratePeriod("idle periods left the steered equilibrium off target");
  }
  return acf;
}

AcfSet acf_from_estimates(const MarketParams& market, const Fleet& fleet,
                          const Vector& gamma_believed, double sum_inv_eps_believed) {
  if (gamma_believed.size() != market.periods())
    throw std::invalid_argument("believed slopes size mismatch");
  if (!((gamma_believed.array() > 0.0).all() && sum_inv_eps_believed > 0.0))
    throw std::invalid_argument("believed aggregates must be positive");

  const Eigen::Index n = fleet.size();
  const Eigen::Index nt = market.periods();
  const double s = sum_inv_eps_believed;

  const Vector z = Vector::Ones(nt) + 2.0 * s * gamma_believed;
  const double w = z.cwiseInverse().sum();
  const double bsum = (market.beta.array() / z.array()).sum();

  AcfSet acf;
  acf.a.resize(n, nt);
  acf.b.resize(n, nt);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lever = fleet.eps[i] * s - 1.0;
    for (Eigen::Index t = 0; t < nt; ++t) {
      const double target = (bsum - market.beta[t] * w) / (z[t] * w * fleet.eps[i]);
      acf.a(i, t) = 2.0 * gamma_believed[t] * lever;
      acf.b(i, t) = -gamma_believed[t] * target * lever;
    }
  }
  check_concavity(acf, market, fleet);
  return acf;
}

Matrix revenue_neutrality_check(const AcfSet& acf, const Schedule& sched) {
  if (acf.a.rows() != sched.rows() || acf.a.cols() != sched.cols() ||
      acf.b.rows() != sched.rows() || acf.b.cols() != sched.cols())
    throw std::invalid_argument("surcharge and schedule dimensions mismatch");
  return (0.5 * acf.a.array() * sched.array().square() +
          acf.b.array() * sched.array())
      .matrix();
}

SensitivityResult sensitivity_experiment(const MarketParams& market, const Fleet& fleet,
                                         MisestimatedParameter which, double rel_error) {
  if (!(std::isfinite(rel_error) && std::abs(rel_error) < 1.0))
    throw std::invalid_argument("relative error must lie in (-1, 1)");

  SensitivityResult out;
  out.profit_gc = gc_closed_form(market, fleet).report.aggregate;
  out.profit_ne = ne_solve(market, fleet).report.aggregate;

  const AcfSet exact = acf_multi_period(market, fleet);
  out.profit_true_acf = ne_solve(market, fleet, &exact).report.aggregate;

  Vector gamma_believed = market.gamma;
  double s_believed = fleet.sum_inv_eps();
  if (which == MisestimatedParameter::kGamma)
    gamma_believed *= 1.0 + rel_error;
  else
    s_believed *= 1.0 + rel_error;

  const AcfSet skewed = acf_from_estimates(market, fleet, gamma_believed, s_believed);
  out.profit_misestimated_acf = ne_solve(market, fleet, &skewed).report.aggregate;
  return out;
}

}  // namespace fleq
