#include "fleq/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fleq/csv.hpp"
#include "fleq/errors.hpp"
#include "fleq/rng.hpp"

namespace fleq {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

void reject_unknown_keys(const json& object, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& item : object.items())
    if (!allowed.count(item.key())) fail("unknown key '" + where + item.key() + "'");
}

const json& need(const json& object, const std::string& where, const char* key) {
  const auto it = object.find(key);
  if (it == object.end()) fail("missing key '" + where + key + "'");
  return *it;
}

double as_number(const json& value, const std::string& what) {
  if (!value.is_number()) fail(what + " must be a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) fail(what + " must be finite");
  return x;
}

std::int64_t as_integer(const json& value, const std::string& what) {
  if (!value.is_number_integer() && !value.is_number_unsigned())
    fail(what + " must be an integer");
  return value.get<std::int64_t>();
}

std::vector<double> as_number_list(const json& value, const std::string& what) {
  if (!value.is_array()) fail(what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& item : value) out.push_back(as_number(item, what + " entry"));
  return out;
}

void parse_market(const json& block, ScenarioConfig& config) {
  if (!block.is_object()) fail("'market' must be an object");
  reject_unknown_keys(block, "market.", {"beta", "beta_csv", "gamma", "gamma_rule"});

  if (block.contains("beta") == block.contains("beta_csv"))
    fail("market needs exactly one of 'beta' and 'beta_csv'");
  if (block.contains("beta")) {
    auto beta = as_number_list(block["beta"], "market.beta");
    if (beta.size() < 2) fail("market.beta needs at least two periods");
    config.beta = std::move(beta);
  } else {
    if (!block["beta_csv"].is_string()) fail("market.beta_csv must be a string");
    config.beta_csv = block["beta_csv"].get<std::string>();
  }

  if (block.contains("gamma") == block.contains("gamma_rule"))
    fail("market needs exactly one of 'gamma' and 'gamma_rule'");
  if (block.contains("gamma")) {
    auto gamma = as_number_list(block["gamma"], "market.gamma");
    if (gamma.size() < 2) fail("market.gamma needs at least two periods");
    for (double g : gamma)
      if (!(g > 0.0)) fail("market.gamma entries must be positive");
    config.gamma = std::move(gamma);
  } else {
    const json& rule = block["gamma_rule"];
    if (!rule.is_object()) fail("'market.gamma_rule' must be an object");
    reject_unknown_keys(rule, "market.gamma_rule.", {"mean_gamma", "jitter"});
    GammaRule parsed;
    parsed.mean_gamma =
        as_number(need(rule, "market.gamma_rule.", "mean_gamma"), "market.gamma_rule.mean_gamma");
    parsed.jitter =
        as_number(need(rule, "market.gamma_rule.", "jitter"), "market.gamma_rule.jitter");
    if (!(parsed.mean_gamma > 0.0)) fail("market.gamma_rule.mean_gamma must be positive");
    if (!(parsed.jitter >= 0.0 && parsed.jitter < 1.0))
      fail("market.gamma_rule.jitter must lie in [0, 1)");
    config.gamma_rule = parsed;
  }
}

void parse_fleet(const json& block, ScenarioConfig& config) {
  if (!block.is_object()) fail("'fleet' must be an object");
  reject_unknown_keys(block, "fleet.", {"eps", "random_eps"});

  if (block.contains("eps") == block.contains("random_eps"))
    fail("fleet needs exactly one of 'eps' and 'random_eps'");
  if (block.contains("eps")) {
    auto eps = as_number_list(block["eps"], "fleet.eps");
    if (eps.empty()) fail("fleet.eps must not be empty");
    for (double e : eps)
      if (!(e > 0.0)) fail("fleet.eps entries must be positive");
    config.eps = std::move(eps);
  } else {
    const json& spec = block["random_eps"];
    if (!spec.is_object()) fail("'fleet.random_eps' must be an object");
    reject_unknown_keys(spec, "fleet.random_eps.", {"n", "lo", "hi"});
    RandomEps parsed;
    parsed.n = as_integer(need(spec, "fleet.random_eps.", "n"), "fleet.random_eps.n");
    parsed.lo = as_number(need(spec, "fleet.random_eps.", "lo"), "fleet.random_eps.lo");
    parsed.hi = as_number(need(spec, "fleet.random_eps.", "hi"), "fleet.random_eps.hi");
    if (parsed.n < 1) fail("fleet.random_eps.n must be at least 1");
    if (!(parsed.lo > 0.0) || !(parsed.hi >= parsed.lo))
      fail("fleet.random_eps bounds must satisfy 0 < lo <= hi");
    config.random_eps = parsed;
  }
}

struct FieldPolicy {
  bool market = false;
  bool tariff = false;
  bool delta = false;
  bool n_max = false;
  bool rel_error = false;
  bool storage = false;
};

FieldPolicy policy_for(ExperimentKind kind) {
  FieldPolicy p;
  switch (kind) {
    case ExperimentKind::kFig1:
      p.n_max = true;
      break;
    case ExperimentKind::kFig2:
    case ExperimentKind::kFig3:
      p.n_max = true;
      p.rel_error = true;
      break;
    case ExperimentKind::kFig4:
      p.market = true;
      break;
    case ExperimentKind::kFig5:
      p.market = true;
      p.tariff = true;
      p.delta = true;
      p.storage = true;
      break;
    case ExperimentKind::kBargain:
    case ExperimentKind::kCoopRegion:
      p.market = true;
      p.tariff = true;
      p.delta = true;
      break;
  }
  return p;
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kFig1: return "fig1";
    case ExperimentKind::kFig2: return "fig2";
    case ExperimentKind::kFig3: return "fig3";
    case ExperimentKind::kFig4: return "fig4";
    case ExperimentKind::kFig5: return "fig5";
    case ExperimentKind::kBargain: return "bargain";
    case ExperimentKind::kCoopRegion: return "coop-region";
  }
  fail("unreachable experiment kind");
}

ExperimentKind experiment_from_name(const std::string& name) {
  if (name == "fig1") return ExperimentKind::kFig1;
  if (name == "fig2") return ExperimentKind::kFig2;
  if (name == "fig3") return ExperimentKind::kFig3;
  if (name == "fig4") return ExperimentKind::kFig4;
  if (name == "fig5") return ExperimentKind::kFig5;
  if (name == "bargain") return ExperimentKind::kBargain;
  if (name == "coop-region") return ExperimentKind::kCoopRegion;
  fail("unknown experiment '" + name + "'");
}

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("config root must be an object");
  reject_unknown_keys(root, "",
                      {"experiment", "out_dir", "market", "fleet", "seed", "tariff", "delta",
                       "n_max", "rel_error", "storage"});

  ScenarioConfig config;
  config.base_dir = base_dir;

  const json& name = need(root, "", "experiment");
  if (!name.is_string()) fail("'experiment' must be a string");
  config.experiment = experiment_from_name(name.get<std::string>());
  const FieldPolicy policy = policy_for(config.experiment);

  if (root.contains("out_dir")) {
    if (!root["out_dir"].is_string()) fail("'out_dir' must be a string");
    config.out_dir = root["out_dir"].get<std::string>();
  }

  if (policy.market) {
    parse_market(need(root, "", "market"), config);
    parse_fleet(need(root, "", "fleet"), config);
  } else if (root.contains("market") || root.contains("fleet")) {
    fail("experiment '" + experiment_name(config.experiment) +
         "' does not take 'market' or 'fleet'");
  }

  const bool randomized = config.gamma_rule.has_value() || config.random_eps.has_value();
  if (root.contains("seed")) {
    if (!randomized) fail("'seed' given but nothing in the config is random");
    const std::int64_t seed = as_integer(root["seed"], "seed");
    if (seed < 0) fail("'seed' must be nonnegative");
    config.seed = static_cast<std::uint64_t>(seed);
  } else if (randomized) {
    fail("randomized scenario needs a 'seed'");
  }

  if (root.contains("tariff")) {
    if (!policy.tariff)
      fail("experiment '" + experiment_name(config.experiment) + "' does not take 'tariff'");
    const json& block = root["tariff"];
    if (!block.is_object()) fail("'tariff' must be an object");
    reject_unknown_keys(block, "tariff.", {"tau_min", "tau_max"});
    const double lo = as_number(need(block, "tariff.", "tau_min"), "tariff.tau_min");
    const double hi = as_number(need(block, "tariff.", "tau_max"), "tariff.tau_max");
    if (!(lo <= hi)) fail("tariff bounds are inverted");
    config.tariff = TariffBounds(lo, hi);
  } else if (policy.tariff) {
    fail("experiment '" + experiment_name(config.experiment) + "' needs 'tariff'");
  }

  if (root.contains("delta")) {
    if (!policy.delta)
      fail("experiment '" + experiment_name(config.experiment) + "' does not take 'delta'");
    const double delta = as_number(root["delta"], "delta");
    if (!(delta > 0.0 && delta < 1.0)) fail("'delta' must lie strictly inside (0, 1)");
    config.delta = delta;
  } else if (policy.delta) {
    fail("experiment '" + experiment_name(config.experiment) + "' needs 'delta'");
  }

  if (root.contains("n_max")) {
    if (!policy.n_max)
      fail("experiment '" + experiment_name(config.experiment) + "' does not take 'n_max'");
    config.n_max = as_integer(root["n_max"], "n_max");
    const std::int64_t floor = config.experiment == ExperimentKind::kFig1 ? 1 : 2;
    if (*config.n_max < floor)
      fail("'n_max' must be at least " + std::to_string(floor));
  } else if (policy.n_max) {
    fail("experiment '" + experiment_name(config.experiment) + "' needs 'n_max'");
  }

  if (root.contains("rel_error")) {
    if (!policy.rel_error)
      fail("experiment '" + experiment_name(config.experiment) + "' does not take 'rel_error'");
    const double rel = as_number(root["rel_error"], "rel_error");
    if (!(rel > 0.0 && rel < 1.0)) fail("'rel_error' must lie strictly inside (0, 1)");
    config.rel_error = rel;
  }

  if (root.contains("storage")) {
    if (!policy.storage)
      fail("experiment '" + experiment_name(config.experiment) + "' does not take 'storage'");
    const std::int64_t index = as_integer(root["storage"], "storage");
    if (index < 0) fail("'storage' must be nonnegative");
    config.storage = static_cast<Eigen::Index>(index);
  }

  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.has_parent_path() ? path.parent_path()
                                                           : std::filesystem::path("."));
}

std::string serialize_config(const ScenarioConfig& config) {
  ordered_json root;
  root["experiment"] = experiment_name(config.experiment);
  if (config.out_dir) root["out_dir"] = *config.out_dir;

  if (config.beta || config.beta_csv) {
    ordered_json market;
    if (config.beta) market["beta"] = *config.beta;
    if (config.beta_csv) market["beta_csv"] = *config.beta_csv;
    if (config.gamma) market["gamma"] = *config.gamma;
    if (config.gamma_rule)
      market["gamma_rule"] = {{"mean_gamma", config.gamma_rule->mean_gamma},
                              {"jitter", config.gamma_rule->jitter}};
    root["market"] = market;

    ordered_json fleet;
    if (config.eps) fleet["eps"] = *config.eps;
    if (config.random_eps)
      fleet["random_eps"] = {{"n", static_cast<std::int64_t>(config.random_eps->n)},
                             {"lo", config.random_eps->lo},
                             {"hi", config.random_eps->hi}};
    root["fleet"] = fleet;
  }

  if (config.seed) root["seed"] = *config.seed;
  if (config.tariff)
    root["tariff"] = {{"tau_min", config.tariff->tau_min}, {"tau_max", config.tariff->tau_max}};
  if (config.delta) root["delta"] = *config.delta;
  if (config.n_max) root["n_max"] = *config.n_max;
  if (config.rel_error) root["rel_error"] = *config.rel_error;
  if (config.storage) root["storage"] = static_cast<std::int64_t>(*config.storage);

  return root.dump(2) + "\n";
}

Scenario build_scenario(const ScenarioConfig& config) {
  if (!(config.beta || config.beta_csv) || !(config.eps || config.random_eps))
    fail("experiment '" + experiment_name(config.experiment) + "' carries no market scenario");

  Vector beta;
  if (config.beta) {
    beta = Eigen::Map<const Vector>(config.beta->data(),
                                    static_cast<Eigen::Index>(config.beta->size()));
  } else {
    beta = load_prices_csv(config.base_dir / *config.beta_csv);
  }
  const Eigen::Index nt = beta.size();

  SplitMix64 rng(config.seed.value_or(0));

  Vector gamma;
  if (config.gamma) {
    if (static_cast<Eigen::Index>(config.gamma->size()) != nt)
      fail("market.gamma length does not match the number of periods");
    gamma = Eigen::Map<const Vector>(config.gamma->data(), nt);
  } else {
    Vector scaled(nt);
    for (Eigen::Index t = 0; t < nt; ++t)
      scaled[t] = beta[t] * (1.0 + rng.uniform(-config.gamma_rule->jitter,
                                               config.gamma_rule->jitter));
    if (!(scaled.minCoeff() > 0.0))
      fail("gamma_rule needs strictly positive prices to scale");
    gamma = scaled * (config.gamma_rule->mean_gamma * static_cast<double>(nt) / scaled.sum());
  }

  Vector eps;
  if (config.eps) {
    eps = Eigen::Map<const Vector>(config.eps->data(),
                                   static_cast<Eigen::Index>(config.eps->size()));
  } else {
    eps.resize(config.random_eps->n);
    for (Eigen::Index i = 0; i < eps.size(); ++i)
      eps[i] = rng.uniform(config.random_eps->lo, config.random_eps->hi);
  }

  return {MarketParams(std::move(beta), std::move(gamma)), Fleet(std::move(eps))};
}

}  // namespace fleq
