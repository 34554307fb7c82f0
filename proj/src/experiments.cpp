#include "fleq/experiments.hpp"

#include <stdexcept>
#include <string>

#include "fleq/acf.hpp"
#include "fleq/bargaining.hpp"
#include "fleq/csv.hpp"
#include "fleq/equilibrium.hpp"
#include "fleq/errors.hpp"

namespace fleq {

namespace {

std::string cell(double value) { return format_double(value); }
std::string cell(Eigen::Index value) { return std::to_string(value); }

double sample_variance(const Vector& v) {
  if (v.size() < 2) return 0.0;
  const Vector centered = v.array() - v.mean();
  return centered.squaredNorm() / static_cast<double>(v.size() - 1);
}

void require_budgets(const Schedule& sched, double tol, const char* regime) {
  if (sched.rowwise().sum().cwiseAbs().maxCoeff() > tol)
    throw std::runtime_error(std::string(regime) + " schedule violates a storage budget");
}

Eigen::Index storage_index(const ScenarioConfig& config, const Fleet& fleet) {
  const Eigen::Index i = config.storage.value_or(0);
  if (i >= fleet.size()) throw ConfigError("'storage' index exceeds the fleet size");
  return i;
}

}  // namespace

double tariff_spread(const Vector& tariff, const Vector& d_row) {
  Eigen::Index buy = 0;
  Eigen::Index sell = 0;
  d_row.maxCoeff(&buy);
  d_row.minCoeff(&sell);
  return tariff[sell] - tariff[buy];
}

std::filesystem::path run_fig1(const ScenarioConfig& config,
                               const std::filesystem::path& out_dir) {
  const MarketParams market = two_period_market(1.0);
  const double limit = 0.25;  // aggregate coalition profit bound 1/(4*gamma)

  const auto path = out_dir / "fig1.csv";
  CsvWriter csv(path, {"n", "profit_gc", "profit_ne", "limit"});
  for (Eigen::Index n = 1; n <= *config.n_max; ++n) {
    const Fleet fleet(Vector::Ones(n));
    const GcSolution gc = gc_closed_form(market, fleet);
    const NeSolution ne = ne_closed_form_two_period(1.0, fleet);
    csv.row({cell(n), cell(gc.report.aggregate), cell(ne.report.aggregate), cell(limit)});
  }
  return path;
}

std::filesystem::path run_fig2_fig3(const ScenarioConfig& config,
                                    const std::filesystem::path& out_dir) {
  const auto which = config.experiment == ExperimentKind::kFig2
                         ? MisestimatedParameter::kSumInvEps
                         : MisestimatedParameter::kGamma;
  const double rel = config.rel_error.value_or(0.30);
  const MarketParams market = two_period_market(1.0);

  const auto path = out_dir / (experiment_name(config.experiment) + ".csv");
  CsvWriter csv(path, {"n", "profit_gc", "profit_ne", "profit_over", "profit_under"});
  for (Eigen::Index n = 2; n <= *config.n_max; ++n) {
    const Fleet fleet(Vector::Ones(n));
    const SensitivityResult over = sensitivity_experiment(market, fleet, which, rel);
    const SensitivityResult under = sensitivity_experiment(market, fleet, which, -rel);
    csv.row({cell(n), cell(over.profit_gc), cell(over.profit_ne),
             cell(over.profit_misestimated_acf), cell(under.profit_misestimated_acf)});
  }
  return path;
}

std::vector<std::filesystem::path> run_fig4(const ScenarioConfig& config,
                                            const std::filesystem::path& out_dir) {
  const auto [market, fleet] = build_scenario(config);
  const GcSolution gc = gc_closed_form(market, fleet);
  const NeSolution ne = ne_solve(market, fleet);

  require_budgets(gc.sched, 1e-8, "coalition");
  require_budgets(ne.sched, 1e-8, "equilibrium");
  if (!(ne.report.aggregate < gc.report.aggregate))
    throw std::runtime_error("equilibrium profit failed to stay below the coalition profit");
  if (sample_variance(ne.report.per_period_price) >
      sample_variance(gc.report.per_period_price))
    throw std::runtime_error("equilibrium prices came out rougher than coalition prices");

  const auto energy_path = out_dir / "fig4_energy.csv";
  CsvWriter energy(energy_path, {"period", "total_ne", "total_gc"});
  for (Eigen::Index t = 0; t < market.periods(); ++t)
    energy.row({cell(t), cell(ne.sched.col(t).sum()), cell(gc.sched.col(t).sum())});

  const auto prices_path = out_dir / "fig4_prices.csv";
  CsvWriter prices(prices_path, {"period", "beta", "price_ne", "price_gc"});
  for (Eigen::Index t = 0; t < market.periods(); ++t)
    prices.row({cell(t), cell(market.beta[t]), cell(ne.report.per_period_price[t]),
                cell(gc.report.per_period_price[t])});

  return {energy_path, prices_path};
}

std::filesystem::path run_fig5(const ScenarioConfig& config,
                               const std::filesystem::path& out_dir) {
  const auto [market, fleet] = build_scenario(config);
  const Eigen::Index i = storage_index(config, fleet);
  const TariffBounds bounds = *config.tariff;
  const RepeatedGameParams params(*config.delta);

  const GcSolution gc = gc_closed_form(market, fleet);
  const Interval box = feasible_theta_box(i, gc, market, bounds);
  if (box.empty())
    throw std::runtime_error("no transfer tariff fits inside the box");

  const Vector row = gc.sched.row(i).transpose();
  const Vector direction = row / row.squaredNorm();

  constexpr int kPoints = 201;
  const auto path = out_dir / "fig5.csv";
  CsvWriter csv(path, {"tau_hat", "storage_coop", "storage_cheat", "agg_coop", "agg_cheat"});
  for (int k = 0; k < kPoints; ++k) {
    const double theta = box.lo + (box.hi - box.lo) * k / (kPoints - 1);
    const Vector tau = gc.report.per_period_price + theta * direction;
    const LongtermProfits coop = longterm_profits(i, tau, gc, market, fleet, params,
                                                  DefectTime::never(), DefectTime::never(),
                                                  bounds);
    const LongtermProfits s_cheat = longterm_profits(i, tau, gc, market, fleet, params,
                                                     DefectTime::at(0), DefectTime::never(),
                                                     bounds);
    const LongtermProfits a_cheat = longterm_profits(i, tau, gc, market, fleet, params,
                                                     DefectTime::never(), DefectTime::at(0),
                                                     bounds);
    csv.row({cell(tariff_spread(tau, row)), cell(coop.storage), cell(s_cheat.storage),
             cell(coop.aggregator), cell(a_cheat.aggregator)});
  }
  return path;
}

std::filesystem::path run_bargain(const ScenarioConfig& config,
                                  const std::filesystem::path& out_dir) {
  const auto [market, fleet] = build_scenario(config);
  const TariffBounds bounds = *config.tariff;
  const RepeatedGameParams params(*config.delta);
  const GcSolution gc = gc_closed_form(market, fleet);

  const auto path = out_dir / "bargain.csv";
  CsvWriter csv(path, {"storage", "theta_star", "tau_spread", "utility_storage",
                       "utility_agg", "feasible"});
  for (Eigen::Index i = 0; i < fleet.size(); ++i) {
    const BargainOutcome deal = nash_bargain(i, gc, market, fleet, params, bounds);
    if (deal.feasible) {
      csv.row({cell(i), cell(deal.theta_star),
               cell(tariff_spread(deal.tariff, gc.sched.row(i).transpose())),
               cell(deal.utility_storage), cell(deal.utility_aggregator), "true"});
    } else {
      csv.row({cell(i), "", "", "", "", "false"});
    }
  }
  return path;
}

std::filesystem::path run_coop_region(const ScenarioConfig& config,
                                      const std::filesystem::path& out_dir) {
  const auto [market, fleet] = build_scenario(config);
  const TariffBounds bounds = *config.tariff;
  const RepeatedGameParams params(*config.delta);
  const GcSolution gc = gc_closed_form(market, fleet);

  const auto path = out_dir / "coop_region.csv";
  CsvWriter csv(path, {"storage", "part", "theta_lo", "theta_hi", "spread_at_theta_lo",
                       "spread_at_theta_hi", "empty"});
  for (Eigen::Index i = 0; i < fleet.size(); ++i) {
    const CooperationRegion region =
        cooperation_region_theta(i, gc, market, fleet, params, bounds);
    if (region.theta.parts().empty()) {
      csv.row({cell(i), "", "", "", "", "", "true"});
      continue;
    }
    const Vector row = gc.sched.row(i).transpose();
    const Vector direction = row / row.squaredNorm();
    const Vector& p = gc.report.per_period_price;
    Eigen::Index part = 0;
    for (const Interval& piece : region.theta.parts()) {
      csv.row({cell(i), cell(part), cell(piece.lo), cell(piece.hi),
               cell(tariff_spread(p + piece.lo * direction, row)),
               cell(tariff_spread(p + piece.hi * direction, row)), "false"});
      ++part;
    }
  }
  return path;
}

std::vector<std::filesystem::path> run_experiment(const ScenarioConfig& config,
                                                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  switch (config.experiment) {
    case ExperimentKind::kFig1:
      return {run_fig1(config, out_dir)};
    case ExperimentKind::kFig2:
    case ExperimentKind::kFig3:
      return {run_fig2_fig3(config, out_dir)};
    case ExperimentKind::kFig4:
      return run_fig4(config, out_dir);
    case ExperimentKind::kFig5:
      return {run_fig5(config, out_dir)};
    case ExperimentKind::kBargain:
      return {run_bargain(config, out_dir)};
    case ExperimentKind::kCoopRegion:
      return {run_coop_region(config, out_dir)};
  }
  throw std::logic_error("unreachable experiment kind");
}

}  // namespace fleq
