#pragma once

#include "ptrack/ospa.hpp"
#include "ptrack/phd_filter.hpp"
#include "ptrack/scenario.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace ptrack {

/// Malformed configuration or scenario input. The message starts with the
/// dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FilterKind { phdf_m, phdf_u };

std::string to_string(FilterKind kind);
FilterKind parse_filter_kind(const std::string& name);

struct ExperimentConfig {
  std::string scenario_source;  // file path, or the name of a built-in scenario
  Scenario scenario;
  FilterKind filter = FilterKind::phdf_m;
  FilterConfig filter_config;
  OspaParams ospa;
  int mc_runs = 1;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";

  void validate() const;
};

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// "paper_fig2" names the built-in scenario; anything else is a file path
/// resolved against `base_dir`.
Scenario resolve_scenario(const std::string& source, const std::filesystem::path& base_dir);

nlohmann::json experiment_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Uniform-birth particle count matching the adaptive filter's per-scan birth
/// count when every scenario target is present: M_b (N pd + lambda) per pair.
std::size_t matched_uniform_birth_count(const Scenario& scenario, const BirthConfig& birth);

}  // namespace ptrack
