#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rffkim/mcmc.hpp"

namespace rffkim::harness {

/// Temperature used for a named regime: low 1.5, crit T_c, high 3.5.
double regime_temperature(const std::string& regime);

/// One sweep experiment. Text form is INI:
///
///   [experiment] name, model, regime, temperature, boundary
///   [grid]       n_list, theta, alphas ("auto" or a comma list)
///   [chain]      burn_in (-1 = default), thin, samples, replicas, seed
///   [disorder]   seeds, seed_base
///   [output]     directory, plot
///   [guards]     max_total_sweeps
struct ExperimentConfig {
  std::string name = "experiment";
  ModelKind model = ModelKind::Rffk;
  std::string regime = "crit";
  std::optional<double> temperature;  // overrides the regime when set
  std::string boundary;               // empty: free (rffk) or zero (rfim)

  std::vector<int> n_list;
  double theta = 1.0;
  std::vector<double> alphas;  // empty: alpha(T)

  std::int64_t burn_in = -1;
  std::int64_t thin = 1;
  std::int64_t samples = 200;
  int replicas = 4;
  std::uint64_t seed = 1;

  int disorder_seeds = 32;
  std::uint64_t disorder_seed_base = 0;

  std::string output_dir = "results";
  bool plot = true;

  std::int64_t max_total_sweeps = limits::kMaxTotalSweeps;

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_string(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  /// Canonical text; parse(serialize()) reproduces the config exactly.
  [[nodiscard]] std::string serialize() const;

  /// ConfigError for bad values, GuardError when the planned work is above
  /// max_total_sweeps (or the global limit).
  void validate() const;

  [[nodiscard]] double resolved_temperature() const;
  [[nodiscard]] std::vector<double> resolved_alphas() const;
  [[nodiscard]] std::string resolved_boundary() const;
  [[nodiscard]] ChainPlan chain_plan() const;
  /// Sweeps the whole experiment will run.
  [[nodiscard]] std::int64_t planned_sweeps() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::vector<int> parse_int_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

}  // namespace rffkim::harness
