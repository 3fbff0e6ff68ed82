#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rffkim/configuration.hpp"
#include "rffkim/disorder.hpp"
#include "rffkim/lattice.hpp"

namespace rffkim {

namespace limits {
inline constexpr int kMaxSpinBits = 24;
inline constexpr int kMaxEdgeBits = 26;
/// Spin plus edge bits of an Edwards-Sokal joint table.
inline constexpr int kMaxJointBits = 26;
}  // namespace limits

enum class SupportKind { Spin, Edge, Joint };

/// Normalized probability table over configuration codes.
///
/// Spin code: bit v set iff sigma_v = +1. Edge code: bit e set iff omega_e = 1.
/// Joint code: spin code in the low |V| bits, edge code above it.
struct ExactDistribution {
  SupportKind kind = SupportKind::Spin;
  std::vector<double> probabilities;
  double log_z = 0.0;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::string model_tag;

  [[nodiscard]] std::size_t size() const { return probabilities.size(); }
  [[nodiscard]] double operator[](std::uint64_t code) const { return probabilities[code]; }
};

SpinConfig spins_from_code(std::uint64_t code, std::size_t n);
EdgeConfig edges_from_code(std::uint64_t code, std::size_t m);
std::uint64_t code_of(const SpinConfig& sigma);
std::uint64_t code_of(const EdgeConfig& omega);

/// -H/T for the random-field Ising model with spin boundary xi.
double ising_log_weight(const SpinConfig& sigma, const LatticeGraph& g, double t, const BoundaryCondition& xi,
                        const DisorderField& field);

/// sum_e [omega_e ln p + (1 - omega_e) ln(1 - p)] + sum_C ln(2 cosh(eps h_C / T)).
double fk_log_weight(const EdgeConfig& omega, const LatticeGraph& g, const Coupling& k, const BoundaryCondition& gamma,
                     const DisorderField& field);

/// Edwards-Sokal joint weight with free boundary; -inf when an open edge joins
/// disagreeing spins.
double es_joint_log_weight(const SpinConfig& sigma, const EdgeConfig& omega, const LatticeGraph& g, const Coupling& k,
                           const DisorderField& field);

ExactDistribution enumerate_ising(const LatticeGraph& g, double t, const BoundaryCondition& xi,
                                  const DisorderField& field);
ExactDistribution enumerate_fk(const LatticeGraph& g, const Coupling& k, const BoundaryCondition& gamma,
                               const DisorderField& field);
ExactDistribution enumerate_joint(const LatticeGraph& g, const Coupling& k, const DisorderField& field);

/// Spin marginal of a joint table.
ExactDistribution spin_marginal(const ExactDistribution& joint);
/// Edge marginal of a joint table.
ExactDistribution edge_marginal(const ExactDistribution& joint);

/// (1/2) sum |a - b|.
double exact_tv(const ExactDistribution& a, const ExactDistribution& b);

/// Z(h) = Z^{gamma,0} / Z^{gamma,eps h} for the FK measure.
double partition_ratio_exact(const LatticeGraph& g, const BoundaryCondition& gamma, const DisorderField& field,
                             const Coupling& k);

/// <exp(sum_v eps h_v sigma_v / T)> under the zero-field Ising law whose
/// spins are tied within each wiring group of the FK boundary gamma (free
/// boundary: no ties). Equals 1/Z(h).
double ising_field_moment_exact(const LatticeGraph& g, const BoundaryCondition& gamma, const DisorderField& field,
                                double t);

/// A pair of distributions on a common finite set.
struct DistributionPair {
  std::vector<double> a;
  std::vector<double> b;
};

/// Exact TV between the product of the a's and the product of the b's.
double product_tv(std::span<const DistributionPair> components);

/// Two-point pair with TV exactly `tv`: (1/2 + tv/2, 1/2 - tv/2) against its mirror.
DistributionPair two_point_pair(double tv);

/// Product TV for n independent two-point components. `tvs` holds either one
/// value (used for every component) or n values.
double check_product_tv_bound(std::span<const double> tvs, int n);

}  // namespace rffkim
