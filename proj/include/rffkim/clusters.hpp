#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rffkim/configuration.hpp"
#include "rffkim/disorder.hpp"
#include "rffkim/lattice.hpp"

namespace rffkim {

struct Cluster {
  std::vector<int> members;  // ascending vertex indices
  /// Contains a vertex of the interior boundary.
  bool touches_boundary = false;
  /// Wired to the outside through a boundary group (the cluster C*).
  bool boundary = false;
  [[nodiscard]] std::size_t size() const { return members.size(); }
};

/// Open clusters of omega^gamma, ordered by smallest member index.
struct ClusterDecomposition {
  std::vector<int> label;  // vertex -> cluster index
  std::vector<Cluster> clusters;
  int maximal = -1;           // first cluster of largest size (C-diamond)
  int boundary_cluster = -1;  // first wired cluster (C*), -1 when none

  [[nodiscard]] std::size_t kappa() const { return clusters.size(); }
  [[nodiscard]] bool connected(int u, int v) const {
    return label[static_cast<std::size_t>(u)] == label[static_cast<std::size_t>(v)];
  }
};

/// Clusters of omega with each group in `wiring` merged through a ghost vertex.
ClusterDecomposition decompose(const EdgeConfig& omega, const LatticeGraph& g,
                               const std::vector<std::vector<int>>& wiring);
/// Clusters under an FK boundary condition (IsingSpin is rejected).
ClusterDecomposition decompose(const EdgeConfig& omega, const LatticeGraph& g, const BoundaryCondition& gamma);

/// ln cosh x, stable for large |x|.
double log_cosh(double x);

/// h_C (unscaled) for every cluster, interior vertices only.
std::vector<double> cluster_field_sums(const ClusterDecomposition& d, const DisorderField& field);

/// F(h, omega) = sum_C ln cosh(eps h_C / T).
double f_functional(const ClusterDecomposition& d, const DisorderField& field, double t);

struct ClusterStats {
  std::int64_t kappa = 0;
  std::int64_t max_size = 0;
  std::int64_t sum_sq = 0;
  std::int64_t sum_quartic = 0;
  std::int64_t second_size = 0;    // second largest cluster size
  std::int64_t boundary_size = 0;  // |C*|, 0 without wiring
  bool boundary_is_maximal = false;  // C* exists and is a largest cluster
  double f_value = 0.0;
  double moment2 = 0.0;  // sum_C x^2 / 2, x = eps h_C / T
  double moment4 = 0.0;  // sum_C x^4 / 2
};

ClusterStats cluster_stats(const ClusterDecomposition& d, const DisorderField* field = nullptr, double t = 1.0);

struct Crossings {
  bool horizontal = false;
  bool vertical = false;
  bool horizontal_dual = false;
  bool vertical_dual = false;
};

/// Primal crossings of R use open edges with both ends in R. The dual
/// horizontal crossing runs through dual sites (i + 1/2, j + 1/2) with
/// i in [a-1, b], j in [c, d-1] from column a-1 to column b, stepping only
/// across closed edges of R; the vertical dual crossing is the transpose.
Crossings crossing_events(const EdgeConfig& omega, const LatticeGraph& g, const Rectangle& r);

struct BlockRegion {
  Site center;                 // u_i
  std::vector<int> vertices;   // Omega_i, empty when no admissible region exists
};

struct OutmostClosedRegion {
  int m = 0;
  std::vector<BlockRegion> blocks;  // row-major over block centers (x major)
  int eta = 0;                      // number of nonempty regions
};

/// Block centers u_i of the 2M-box partition of Lambda_N(center).
std::vector<Site> block_centers(const LatticeGraph& g, int m);

/// Outmost closed region of omega on g = Lambda_N. Omega_i is the union of all
/// clusters of omega contained in B_i = Lambda_2M(u_i) when that union covers
/// Lambda_M(u_i), and empty otherwise; this is the unique maximal admissible set.
OutmostClosedRegion outmost_closed_region(const EdgeConfig& omega, const LatticeGraph& g, int m);

struct WellConnected {
  bool value = false;
  std::optional<int> main_cluster;  // smallest vertex index of the main cluster
  int large_clusters = 0;           // clusters with diameter >= N/2
};

/// omega restricted to the union of annuli Lambda_2M(u_i) \ Lambda_M(u_i)
/// has exactly one cluster of l_inf diameter >= N/2.
WellConnected well_connected(const EdgeConfig& omega, const LatticeGraph& g, int m);

}  // namespace rffkim
