#pragma once

#include <filesystem>
#include <vector>

#include "fleq/scenario.hpp"

namespace fleq {

// Each runner emits its CSVs into out_dir and returns the paths written.
// Outputs are deterministic: same config, byte-identical files.
std::filesystem::path run_fig1(const ScenarioConfig& config,
                               const std::filesystem::path& out_dir);
std::filesystem::path run_fig2_fig3(const ScenarioConfig& config,
                                    const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> run_fig4(const ScenarioConfig& config,
                                            const std::filesystem::path& out_dir);
std::filesystem::path run_fig5(const ScenarioConfig& config,
                               const std::filesystem::path& out_dir);
std::filesystem::path run_bargain(const ScenarioConfig& config,
                                  const std::filesystem::path& out_dir);
std::filesystem::path run_coop_region(const ScenarioConfig& config,
                                      const std::filesystem::path& out_dir);

std::vector<std::filesystem::path> run_experiment(const ScenarioConfig& config,
                                                  const std::filesystem::path& out_dir);

// Sell-minus-buy tariff differential: tariff at the heaviest discharge period
// minus tariff at the heaviest charge period of `d_row`.
double tariff_spread(const Vector& tariff, const Vector& d_row);

}  // namespace fleq
