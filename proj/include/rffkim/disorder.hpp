#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rffkim/lattice.hpp"

namespace rffkim {

namespace constants {
/// sqrt(2) / (1 + sqrt(2)) = 2 - sqrt(2)
inline constexpr double kCriticalP = 0.58578643762690495119831127579030;
/// 2 / ln(1 + sqrt(2))
inline constexpr double kCriticalT = 2.26918531421302196811404181331724;
inline constexpr double kRegimeTolerance = 1e-12;
}  // namespace constants

/// Temperature / FK edge parameter pair tied by p = 1 - exp(-2/T).
class Coupling {
 public:
  static Coupling from_temperature(double t);
  static Coupling from_p(double p);
  static Coupling critical() { return from_temperature(constants::kCriticalT); }

  [[nodiscard]] double temperature() const { return t_; }
  [[nodiscard]] double p() const { return p_; }

 private:
  Coupling(double t, double p) : t_(t), p_(p) {}
  double t_;
  double p_;
};

enum class Regime { Low, Critical, High };

/// T < T_c, T = T_c (within a relative 1e-12), T > T_c.
Regime classify_temperature(double t);
/// alpha(T): 1, 15/16, 1/2.
double alpha_exponent(double t);
/// beta(T): 1, 7/8, 1/2.
double beta_exponent(double t);
std::string regime_name(Regime r);

/// theta * N^(-alpha).
double epsilon_schedule(int n, double theta, double alpha);

/// I.i.d. standard Gaussian values h_v, one per vertex, plus the strength epsilon.
///
/// Value v is a pure function of (seed, v): Philox4x32-10 keyed by the seed,
/// counter (v, disorder stream), mapped through the AS241 normal quantile.
struct DisorderField {
  std::vector<double> values;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string generator = "philox4x32-10+as241";

  [[nodiscard]] std::size_t size() const { return values.size(); }
  /// epsilon * h_v
  [[nodiscard]] double scaled(int v) const { return epsilon * values[static_cast<std::size_t>(v)]; }
  [[nodiscard]] DisorderField with_epsilon(double eps) const;
};

DisorderField sample_field(const LatticeGraph& g, std::uint64_t seed, double epsilon = 0.0);
/// Single value h_v for the given seed, independent of any graph.
double field_value(std::uint64_t seed, std::uint64_t vertex);

/// h_A = sum of h_x over x in A (unscaled).
double field_sum(const DisorderField& field, std::span<const int> subset);

/// CSV with header vertex_index,x,y,h_value.
void write_field_csv(std::ostream& out, const LatticeGraph& g, const DisorderField& field);
DisorderField read_field_csv(std::istream& in, const LatticeGraph& g, double epsilon);

}  // namespace rffkim
