#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rffkim/harness/config.hpp"

namespace rffkim::harness {

/// Where the samples behind a chain came from.
struct ChainProvenance {
  std::uint64_t seed_base = 0;
  std::uint64_t stream = 0;
  int replicas = 0;
  std::int64_t burn_in = 0;
  std::int64_t thin = 0;
  std::int64_t samples = 0;
};

struct SweepRow {
  double t = 0.0;
  int n = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double tv_mean = 0.0;
  double tv_se = 0.0;  // spread over disorder seeds / sqrt(D); jackknife error when D = 1
  double z_hat = 0.0;
  double z_se = 0.0;
  double p2_exceed = 0.0;
  double p3_exceed = 0.0;
  int unreliable = 0;  // disorder seeds whose bridge overlap was too small

  ChainProvenance reference;
  ChainProvenance fk_reference;  // rfim only: zero-field FK chain for the P2/P3 columns
  std::vector<std::uint64_t> disorder_seeds;
  std::vector<ChainProvenance> tilted;  // one per disorder seed
};

inline constexpr const char* kSweepHeader = "T,N,epsilon,alpha,tv_mean,tv_se,z_hat,z_se,p2_exceed,p3_exceed";

using ProgressFn = std::function<void(const std::string&)>;

/// Runs the TV / Z(h) / (P2,P3) sweep described by the config: one row per
/// (N, alpha). The zero-field reference chain is shared by all disorder seeds
/// and schedules of a given N.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const ProgressFn& progress = {});

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace rffkim::harness
