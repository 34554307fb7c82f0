#pragma once

#include <Eigen/Dense>

namespace fleq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Rows are storages, columns are trading periods. Budget-feasible schedules
// have zero row sums: every storage returns the energy it takes.
using Schedule = Eigen::MatrixXd;

// One price per period, linear in the fleet's total purchase:
// p(t, D) = beta[t] + gamma[t] * D.
struct MarketParams {
  Vector beta;
  Vector gamma;

  MarketParams(Vector beta_in, Vector gamma_in);

  Eigen::Index periods() const { return beta.size(); }
};

// Quadratic degradation cost slopes; storage i pays eps[i]/2 * x^2 for moving
// x in one period.
struct Fleet {
  Vector eps;

  explicit Fleet(Vector eps_in);

  Eigen::Index size() const { return eps.size(); }
  double sum_inv_eps() const { return eps.cwiseInverse().sum(); }
};

struct ProfitReport {
  Vector per_storage;
  double aggregate = 0.0;
  Vector per_period_price;
};

// The reduced two-period setting: beta = (0, 1) and each period carrying half
// of the effective slope, which reproduces the single-slope payoff
// d - gamma_eff * d * D - eps * d^2 exactly.
MarketParams two_period_market(double gamma_eff);

double price(const MarketParams& market, Eigen::Index t, double total_demand);

double storage_profit(Eigen::Index i, const Schedule& d, const MarketParams& market,
                      const Fleet& fleet);

ProfitReport aggregate_profit(const Schedule& d, const MarketParams& market,
                              const Fleet& fleet);

// Same report for a raw slope vector; admits eps entries equal to zero, which
// the Fleet type rejects.
ProfitReport aggregate_profit(const Schedule& d, const MarketParams& market,
                              const Vector& eps);

// Max-norm violation of the coalition optimality system at (d, lambda):
// per-entry stationarity -beta_t - 2 gamma_t D_t - eps_i d_it + lambda_i
// together with the per-storage budget sums.
double kkt_residual_gc(const Schedule& d, const Vector& lambda,
                       const MarketParams& market, const Fleet& fleet);

}  // namespace fleq
