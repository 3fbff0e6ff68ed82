#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rffkim/mcmc.hpp"

namespace rffkim {

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  int replicas = 0;
  std::string method;
  std::map<std::string, double> diagnostics;
  bool unreliable = false;
};

// ---- generic sample statistics ----

double mean(std::span<const double> x);
/// Unbiased sample variance (0 for fewer than two values).
double variance(std::span<const double> x);
double median(std::vector<double> x);
/// Integrated autocorrelation time with Sokal's automatic window (c = 6);
/// tau = 1/2 for uncorrelated data.
double integrated_autocorrelation_time(std::span<const double> x);
/// Standard error of the mean from `batches` non-overlapping batch means.
double batch_means_error(std::span<const double> x, int batches = 20);

/// Delete-one-block jackknife of a statistic of blocked data.
template <class Stat>
EstimateWithError jackknife(std::size_t blocks, Stat stat_without, double full_value) {
  EstimateWithError e;
  e.value = full_value;
  e.replicas = static_cast<int>(blocks);
  if (blocks < 2) return e;
  std::vector<double> loo(blocks);
  for (std::size_t b = 0; b < blocks; ++b) loo[b] = stat_without(b);
  const double m = mean(loo);
  double s = 0.0;
  for (double v : loo) s += (v - m) * (v - m);
  e.std_error = std::sqrt(static_cast<double>(blocks - 1) / static_cast<double>(blocks) * s);
  return e;
}

// ---- Radon-Nikodym samples ----

/// Log-likelihood-ratio statistic L with d(tilted)/d(reference) = Z(h) exp(L):
/// L = F(h, omega) for the FK model, sum_v eps h_v sigma_v / T for the Ising model.
/// Values are grouped in blocks (replicas) for the jackknife.
struct RatioSamples {
  std::vector<std::vector<double>> reference;  // L on zero-field samples
  std::vector<std::vector<double>> tilted;     // L on with-field samples
};

/// Zero-field chain output kept in a form that allows evaluating L for any field.
class ReferenceSamples {
 public:
  static ReferenceSamples collect(const ModelSpec& spec, const ChainPlan& plan);

  /// L for every stored sample, grouped by replica.
  [[nodiscard]] std::vector<std::vector<double>> statistic(const DisorderField& field) const;
  [[nodiscard]] std::size_t sample_count() const { return replica_.size(); }
  [[nodiscard]] int replicas() const { return replicas_; }
  [[nodiscard]] const std::vector<Sample>& samples() const { return samples_; }

 private:
  ModelKind model_ = ModelKind::Rffk;
  double t_ = 1.0;
  int replicas_ = 0;
  std::size_t vertices_ = 0;
  std::vector<int> replica_;
  std::vector<int> cluster_count_;
  std::vector<std::int32_t> labels_;  // FK: cluster label per vertex per sample
  std::vector<std::int8_t> spins_;    // Ising: spins per sample
  std::vector<Sample> samples_;
};

/// L on with-field samples of spec, grouped by replica.
std::vector<std::vector<double>> tilted_statistics(const ModelSpec& spec, const ChainPlan& plan);

/// Runs the zero-field chain (plan.stream) and the with-field chain
/// (plan.stream + 1) and returns their L values.
RatioSamples collect_ratio_samples(const ModelSpec& spec, const ChainPlan& plan);

namespace limits {
/// Bridge overlap (Bhattacharyya coefficient) below which Z estimates are flagged.
inline constexpr double kMinBridgeOverlap = 0.05;
}  // namespace limits

struct PartitionRatioEstimate {
  EstimateWithError bridge;   // primary: mean_h(e^{-L/2}) / mean_0(e^{L/2})
  EstimateWithError forward;  // 1 / mean_0(e^{L})
  EstimateWithError reverse;  // mean_h(e^{-L})
  double overlap = 1.0;       // sqrt(mean_0(e^{L/2}) mean_h(e^{-L/2}))
  bool unreliable = false;
};

PartitionRatioEstimate estimate_partition_ratio(const RatioSamples& s);

/// TV ~ mean over zero-field samples of (1 - Z exp(L))_+, jackknifed over
/// blocks with Z re-estimated on each reduced sample. Throws
/// PreconditionError when z is null.
EstimateWithError estimate_tv_rn(const RatioSamples& s, const PartitionRatioEstimate* z);

// ---- concentration statistics ----

struct PStatistics {
  double centering = 0.0;      // 2 eps^2 N^2 / T^2
  double p1_margin = 0.0;      // sum_v f(eps h_v / T) - centering
  double p1_threshold = 0.0;   // sqrt(eps^2 N)
  bool p1_holds = true;        // |p1_margin| <= p1_threshold
  double p23_threshold = 0.0;  // eps N^alpha
  std::vector<double> margins; // F - centering per sample
  double p2_exceed = 0.0;      // fraction with margin > threshold
  double p3_exceed = 0.0;      // fraction with margin < -threshold
};

/// `f_values` are F(h, omega) on zero-field samples. n is the box half-side.
PStatistics p_statistics(const DisorderField& field, std::span<const double> f_values, double t, int n,
                         double alpha);

// ---- boundary influence and correlation length ----

struct InfluencePlan {
  ChainPlan chain;
  std::vector<std::uint64_t> disorder_seeds;
  ModelKind sampler = ModelKind::Rffk;
};

/// m(T,N,eps) = (1/2) E(<sigma_o>^{+,eps h} - <sigma_o>^{-,eps h}); each
/// disorder seed uses the same field for both boundaries.
EstimateWithError boundary_influence(double t, int n, double epsilon, const InfluencePlan& plan);

/// Exact m for one field by enumeration (small boxes only).
double boundary_influence_exact(double t, int n, const DisorderField& field);

struct CorrelationLength {
  std::optional<int> value;  // nullopt: beyond the grid
  std::vector<EstimateWithError> m_field;
  std::vector<EstimateWithError> m_zero;
};

/// Smallest grid N with m(T,N,eps) + 2 se below (m(T,N,0) - 2 se0) / 2.
CorrelationLength correlation_length(double t, double epsilon, std::span<const int> grid, const InfluencePlan& plan);

// ---- large-deviation and off-critical cluster tables ----

struct TailRow {
  int n = 0;
  std::size_t samples = 0;
  double median_max_scaled = 0.0;  // median of max|C| / N^{15/8}
  double median_sumsq_scaled = 0.0;  // median of M(omega) / N^{15/4}
  double median_sumsq_over_n2 = 0.0;  // median of M(omega) / N^2
  std::vector<double> max_sizes;
  std::vector<double> sum_sq;
  std::vector<double> second_sizes;
  double boundary_is_maximal = 0.0;  // fraction with C* = C-diamond (wired only)
};

struct TailPlan {
  ChainPlan chain;
  BoundaryCondition boundary = BoundaryCondition::fk_wired();
};

std::vector<TailRow> ldp_tail(double p, std::span<const int> n_list, const TailPlan& plan);

/// Fraction of values >= threshold.
double tail_frequency(std::span<const double> values, double threshold);

}  // namespace rffkim
