#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rffkim/clusters.hpp"
#include "rffkim/configuration.hpp"
#include "rffkim/disorder.hpp"
#include "rffkim/exact.hpp"
#include "rffkim/lattice.hpp"
#include "rffkim/rng.hpp"

namespace rffkim {

enum class ModelKind { Rfim, Rffk };

ModelKind parse_model(const std::string& name);
std::string model_name(ModelKind m);

/// What a chain samples. For Rfim the boundary must be a spin boundary (FkFree
/// is read as the zero boundary). For Rffk any boundary works: FK kinds wire
/// the interior boundary through ghost vertices, spin kinds attach ghost
/// clusters of fixed sign.
struct ModelSpec {
  ModelKind model = ModelKind::Rffk;
  const LatticeGraph* graph = nullptr;
  Coupling coupling = Coupling::critical();
  BoundaryCondition boundary = BoundaryCondition::fk_free();
  DisorderField field;

  void validate() const;
};

namespace limits {
inline constexpr std::int64_t kMaxTotalSweeps = 1'000'000'000;
}

struct ChainPlan {
  std::int64_t burn_in = -1;  // negative: default_burn_in()
  std::int64_t thin = 1;
  std::int64_t samples = 0;
  int replicas = 1;
  std::uint64_t seed_base = 0;
  std::uint64_t stream = streams::kChain;
  bool hot_start = false;
  bool keep_configurations = false;

  /// Throws InvalidParameter for non-positive sizes, GuardError past the sweep limit.
  void validate(const ModelSpec& spec) const;
  [[nodiscard]] std::int64_t effective_burn_in(const ModelSpec& spec) const;
  [[nodiscard]] std::int64_t total_sweeps(const ModelSpec& spec) const;
};

/// 100 N sweeps away from T_c, 20 N^2 at T_c.
std::int64_t default_burn_in(const LatticeGraph& g, double t);

struct ChainState {
  SpinConfig sigma;
  EdgeConfig omega;
  /// Spin-boundary mode only: +1 / -1 when the vertex is bonded to the ghost
  /// of that sign, 0 otherwise.
  std::vector<std::int8_t> ghost_bond;
  std::int64_t sweeps = 0;
  CounterRng rng;
};

/// All-minus spins and closed edges, or i.i.d. uniform spins when `hot`.
ChainState initial_state(const ModelSpec& spec, std::uint64_t seed, std::uint64_t stream = streams::kChain,
                         bool hot = false);

/// g(t) = e^t / (e^t + e^-t).
double logistic_g(double t);
/// P(sigma_x = +1 | rest) for local field sum (neighbours + boundary + eps h_x).
inline double heatbath_plus_probability(double local, double t) { return logistic_g(local / t); }
/// exp(x) / (2 cosh x).
inline double cluster_plus_probability(double x) { return logistic_g(x); }

/// One deterministic index-order pass of single-site heat-bath updates.
void rfim_heatbath_sweep(ChainState& s, const ModelSpec& spec);

/// Edges given spins, then spins given edges. Throws CorruptedState when an
/// open edge joins disagreeing spins on entry.
void es_sweep(ChainState& s, const ModelSpec& spec);

/// Dispatches on spec.model.
void sweep(ChainState& s, const ModelSpec& spec);

/// Clusters of the current edge state, including ghost wiring.
ClusterDecomposition state_clusters(const ChainState& s, const ModelSpec& spec);

/// Joint table pushed once through the exact Edwards-Sokal transition kernel.
ExactDistribution es_transition_apply(const ExactDistribution& joint, const LatticeGraph& g, const Coupling& k,
                                      const DisorderField& field);

struct Sample {
  int replica = 0;
  std::int64_t sweep = 0;
  ClusterStats stats;
  double magnetization = 0.0;  // sum of spins / |V|
  double origin_spin = 0.0;    // spin at the graph origin (0 if absent)
  double field_dot = 0.0;      // sum_v eps h_v sigma_v / T
  SpinConfig sigma;            // only with keep_configurations
  EdgeConfig omega;
};

/// Runs plan.replicas independent chains (replica r keyed by seed_base + r)
/// and returns their thinned samples in replica order. Rfim samples report
/// the like-spin clusters (edges joining equal spins).
std::vector<Sample> run_chain(const ChainPlan& plan, const ModelSpec& spec);

/// Single replica of run_chain.
std::vector<Sample> run_replica(const ChainPlan& plan, const ModelSpec& spec, int replica);

}  // namespace rffkim
