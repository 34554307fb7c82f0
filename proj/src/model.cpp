#include "fleq/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fleq {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

MarketParams::MarketParams(Vector beta_in, Vector gamma_in)
    : beta(std::move(beta_in)), gamma(std::move(gamma_in)) {
  require(beta.size() >= 2, "market needs at least two periods");
  require(gamma.size() == beta.size(), "beta and gamma sizes differ");
  require(all_finite(beta) && all_finite(gamma), "market parameters must be finite");
  require((gamma.array() > 0.0).all(), "price slopes must be positive");
}

Fleet::Fleet(Vector eps_in) : eps(std::move(eps_in)) {
  require(eps.size() >= 1, "fleet is empty");
  require(all_finite(eps), "cost slopes must be finite");
  require((eps.array() > 0.0).all(), "cost slopes must be positive");
}

MarketParams two_period_market(double gamma_eff) {
  require(std::isfinite(gamma_eff) && gamma_eff > 0.0,
          "effective slope must be positive");
  Vector beta(2), gamma(2);
  beta << 0.0, 1.0;
  gamma << 0.5 * gamma_eff, 0.5 * gamma_eff;
  return {beta, gamma};
}

double price(const MarketParams& market, Eigen::Index t, double total_demand) {
  if (t < 0 || t >= market.periods()) throw std::out_of_range("period index");
  return market.beta[t] + market.gamma[t] * total_demand;
}

namespace {

void check_schedule(const Schedule& d, const MarketParams& market, Eigen::Index n) {
  require(d.cols() == market.periods(), "schedule period count mismatch");
  require(d.rows() == n, "schedule storage count mismatch");
}

double storage_profit_eps(Eigen::Index i, const Schedule& d, const MarketParams& market,
                          double eps_i) {
  double profit = 0.0;
  for (Eigen::Index t = 0; t < market.periods(); ++t) {
    const double p = market.beta[t] + market.gamma[t] * d.col(t).sum();
    const double x = d(i, t);
    profit += -p * x - 0.5 * eps_i * x * x;
  }
  return profit;
}

}  // namespace

double storage_profit(Eigen::Index i, const Schedule& d, const MarketParams& market,
                      const Fleet& fleet) {
  check_schedule(d, market, fleet.size());
  if (i < 0 || i >= fleet.size()) throw std::out_of_range("storage index");
  return storage_profit_eps(i, d, market, fleet.eps[i]);
}

ProfitReport aggregate_profit(const Schedule& d, const MarketParams& market,
                              const Vector& eps) {
  require(d.rows() == eps.size(), "schedule storage count mismatch");
  require(d.cols() == market.periods(), "schedule period count mismatch");
  ProfitReport report;
  report.per_period_price =
      market.beta + (market.gamma.array() * d.colwise().sum().transpose().array()).matrix();
  report.per_storage = -(d * report.per_period_price) -
                       0.5 * (eps.array() * d.rowwise().squaredNorm().array()).matrix();
  report.aggregate = report.per_storage.sum();
  return report;
}

ProfitReport aggregate_profit(const Schedule& d, const MarketParams& market,
                              const Fleet& fleet) {
  return aggregate_profit(d, market, fleet.eps);
}

double kkt_residual_gc(const Schedule& d, const Vector& lambda,
                       const MarketParams& market, const Fleet& fleet) {
  check_schedule(d, market, fleet.size());
  require(lambda.size() == fleet.size(), "lambda size mismatch");
  double worst = 0.0;
  for (Eigen::Index t = 0; t < market.periods(); ++t) {
    const double total = d.col(t).sum();
    for (Eigen::Index i = 0; i < fleet.size(); ++i) {
      const double r = -market.beta[t] - 2.0 * market.gamma[t] * total -
                       fleet.eps[i] * d(i, t) + lambda[i];
      worst = std::max(worst, std::abs(r));
    }
  }
  for (Eigen::Index i = 0; i < fleet.size(); ++i)
    worst = std::max(worst, std::abs(d.row(i).sum()));
  return worst;
}

}  // namespace fleq
