#include "fleq/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fleq/acf.hpp"

namespace fleq {

GcSolution gc_closed_form(const MarketParams& market, const Fleet& fleet) {
  const Eigen::Index n = fleet.size();
  const Eigen::Index nt = market.periods();

  GcSolution sol;
  // Every row scales with 1/eps_i, so per_storage starts as that vector and
  // is rescaled in place once the per-unit take is known.
  sol.report.per_storage = fleet.eps.cwiseInverse();
  const Vector& inv_eps = sol.report.per_storage;
  const double s = inv_eps.sum();

  Vector z = Vector::Ones(nt) + 2.0 * s * market.gamma;
  const double w = z.cwiseInverse().sum();
  const double b = (market.beta.array() / z.array()).sum();
  const double lambda_star = b / w;

  Vector common(nt);
  for (Eigen::Index t = 0; t < nt; ++t) common[t] = (b - market.beta[t] * w) / (z[t] * w);

  sol.sched.resize(n, nt);
  for (Eigen::Index t = 0; t < nt; ++t) sol.sched.col(t) = common[t] * inv_eps;
  sol.lambda = Vector::Constant(n, lambda_star);

  sol.report.per_period_price =
      market.beta + (s * market.gamma.array() * common.array()).matrix();
  const double unit_take =
      -common.dot(sol.report.per_period_price) - 0.5 * common.squaredNorm();
  sol.report.per_storage *= unit_take;
  sol.report.aggregate = unit_take * s;
  return sol;
}

GcSolution gc_solve_kkt(const MarketParams& market, const Fleet& fleet) {
  const Eigen::Index n = fleet.size();
  const Eigen::Index nt = market.periods();
  const Eigen::Index dim = n * nt + n;
  const auto d_idx = [nt](Eigen::Index i, Eigen::Index t) { return i * nt + t; };
  const auto l_idx = [n, nt](Eigen::Index i) { return n * nt + i; };

  Matrix a = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);

  // Stationarity: 2 gamma_t D_t + eps_i d_it - lambda_i = -beta_t.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) {
      const Eigen::Index r = d_idx(i, t);
      for (Eigen::Index j = 0; j < n; ++j) a(r, d_idx(j, t)) += 2.0 * market.gamma[t];
      a(r, d_idx(i, t)) += fleet.eps[i];
      a(r, l_idx(i)) = -1.0;
      rhs[r] = -market.beta[t];
    }
  // Budgets.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) a(l_idx(i), d_idx(i, t)) = 1.0;

  const Vector x = solve_linear(a, rhs);

  GcSolution sol;
  sol.sched.resize(n, nt);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) sol.sched(i, t) = x[d_idx(i, t)];
  sol.lambda = x.segment(n * nt, n);
  sol.report = aggregate_profit(sol.sched, market, fleet);
  return sol;
}

NeSolution ne_closed_form_two_period(double gamma_eff, const Vector& eps) {
  if (!(std::isfinite(gamma_eff) && gamma_eff > 0.0))
    throw std::invalid_argument("effective slope must be positive");
  if (eps.size() < 1) throw std::invalid_argument("fleet is empty");
  if (!((eps.array() >= 0.0) &&
        (eps.array() < std::numeric_limits<double>::infinity()))
           .all())
    throw std::invalid_argument("cost slopes must be nonnegative and finite");

  const Eigen::Index n = eps.size();
  const double t_sum = (2.0 * eps.array() + gamma_eff).inverse().sum();
  const double scale = 1.0 / (1.0 + gamma_eff * t_sum);

  NeSolution sol;
  sol.sched.resize(n, 2);
  sol.sched.col(0).array() = scale / (2.0 * eps.array() + gamma_eff);
  sol.sched.col(1) = -sol.sched.col(0);
  const auto d = sol.sched.col(0).array();
  const double total = scale * t_sum;
  // Stationarity in period one: lambda_i = gamma/2 * D + (eps_i + gamma/2) d_i.
  sol.lambda = ((eps.array() + 0.5 * gamma_eff) * d + 0.5 * gamma_eff * total).matrix();

  const double p0 = 0.5 * gamma_eff * total;
  const double p1 = 1.0 - p0;
  sol.report.per_period_price.resize(2);
  sol.report.per_period_price << p0, p1;
  // Antisymmetric schedule: profit_i = (p1 - p0) d_i - eps_i d_i^2.
  sol.report.per_storage = (d * (p1 - p0 - eps.array() * d)).matrix();
  sol.report.aggregate = sol.report.per_storage.sum();
  return sol;
}

NeSolution ne_closed_form_two_period(double gamma_eff, const Fleet& fleet) {
  return ne_closed_form_two_period(gamma_eff, fleet.eps);
}

NeSolution ne_solve(const MarketParams& market, const Fleet& fleet, const AcfSet* acf) {
  const Eigen::Index n = fleet.size();
  const Eigen::Index nt = market.periods();
  if (acf && (acf->a.rows() != n || acf->a.cols() != nt || acf->b.rows() != n ||
              acf->b.cols() != nt))
    throw std::invalid_argument("surcharge dimensions mismatch");

  const Eigen::Index dim = n * nt + n;
  const auto d_idx = [nt](Eigen::Index i, Eigen::Index t) { return i * nt + t; };
  const auto l_idx = [n, nt](Eigen::Index i) { return n * nt + i; };

  Matrix a = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);

  // Per-storage stationarity:
  // gamma_t D_t + (eps_i + gamma_t + a_it) d_it - lambda_i = -beta_t - b_it.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) {
      const Eigen::Index r = d_idx(i, t);
      for (Eigen::Index j = 0; j < n; ++j) a(r, d_idx(j, t)) += market.gamma[t];
      a(r, d_idx(i, t)) += fleet.eps[i] + market.gamma[t] + (acf ? acf->a(i, t) : 0.0);
      a(r, l_idx(i)) = -1.0;
      rhs[r] = -market.beta[t] - (acf ? acf->b(i, t) : 0.0);
    }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) a(l_idx(i), d_idx(i, t)) = 1.0;

  const Vector x = solve_linear(a, rhs);

  NeSolution sol;
  sol.sched.resize(n, nt);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) sol.sched(i, t) = x[d_idx(i, t)];
  sol.lambda = x.segment(n * nt, n);
  sol.report = aggregate_profit(sol.sched, market, fleet);
  return sol;
}

double verify_equilibrium(const Schedule& sched, const MarketParams& market,
                          const Fleet& fleet, const AcfSet* acf) {
  if (sched.rows() != fleet.size() || sched.cols() != market.periods())
    throw std::invalid_argument("schedule dimensions mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < fleet.size(); ++i) {
    std::optional<PeriodQuadratic> extra;
    if (acf) extra = PeriodQuadratic{acf->a.row(i).transpose(), acf->b.row(i).transpose()};
    const double current = response_objective(i, sched.row(i).transpose(), sched,
                                              market, fleet, extra);
    const Vector best = numeric_best_response(i, sched, market, fleet, extra);
    const double improved = response_objective(i, best, sched, market, fleet, extra);
    worst = std::max(worst, improved - current);
  }
  return worst;
}

}  // namespace fleq
