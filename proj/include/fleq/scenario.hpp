#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fleq/aggregator.hpp"
#include "fleq/model.hpp"

namespace fleq {

enum class ExperimentKind { kFig1, kFig2, kFig3, kFig4, kFig5, kBargain, kCoopRegion };

std::string experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

// Per-period price sensitivities proportional to the price level, jittered and
// rescaled so the mean matches mean_gamma.
struct GammaRule {
  double mean_gamma = 0.0;
  double jitter = 0.0;
};

struct RandomEps {
  Eigen::Index n = 0;
  double lo = 0.0;
  double hi = 0.0;
};

// Parsed scenario file.  Field presence mirrors the JSON exactly; experiment
// defaults are applied by the runners, not here.
struct ScenarioConfig {
  ExperimentKind experiment = ExperimentKind::kFig1;
  std::optional<std::string> out_dir;

  std::optional<std::vector<double>> beta;
  std::optional<std::string> beta_csv;
  std::optional<std::vector<double>> gamma;
  std::optional<GammaRule> gamma_rule;

  std::optional<std::vector<double>> eps;
  std::optional<RandomEps> random_eps;

  std::optional<std::uint64_t> seed;
  std::optional<TariffBounds> tariff;
  std::optional<double> delta;
  std::optional<std::int64_t> n_max;
  std::optional<double> rel_error;
  std::optional<Eigen::Index> storage;

  std::filesystem::path base_dir;  // resolves beta_csv; not serialized
};

// Strict parse: unknown keys, wrong types, and per-experiment field mismatches
// all throw ConfigError.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical rendering: fixed key order, two-space indent, shortest round-trip
// numbers; serialize(parse(s)) is idempotent.
std::string serialize_config(const ScenarioConfig& config);

struct Scenario {
  MarketParams market;
  Fleet fleet;
};

// Materializes market and fleet for configs that carry them (fig4/fig5/
// bargain/coop-region).  One seeded stream, jitter draws first (period order),
// then cost draws (storage order).
Scenario build_scenario(const ScenarioConfig& config);

}  // namespace fleq
