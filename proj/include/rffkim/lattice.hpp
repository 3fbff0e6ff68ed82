#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rffkim {

struct Site {
  int x = 0;
  int y = 0;
  auto operator<=>(const Site&) const = default;
};

/// Vertex of the dual lattice Z^2 + (1/2, 1/2); (x, y) stands for (x + 1/2, y + 1/2).
struct DualSite {
  int x = 0;
  int y = 0;
  auto operator<=>(const DualSite&) const = default;
};

/// Unordered nearest-neighbour pair, stored with a < b.
struct PrimalEdge {
  Site a;
  Site b;
  auto operator<=>(const PrimalEdge&) const = default;
};

struct DualEdge {
  DualSite a;
  DualSite b;
  auto operator<=>(const DualEdge&) const = default;
};

PrimalEdge make_primal_edge(Site u, Site v);
DualEdge make_dual_edge(DualSite u, DualSite v);

/// The unique dual edge crossing `e`.
DualEdge dual_of(const PrimalEdge& e);
/// Inverse of dual_of.
PrimalEdge primal_of(const DualEdge& e);

inline int linf_distance(Site u, Site v) {
  const int dx = u.x > v.x ? u.x - v.x : v.x - u.x;
  const int dy = u.y > v.y ? u.y - v.y : v.y - u.y;
  return dx > dy ? dx : dy;
}

struct Neighbor {
  int vertex;
  int edge;
};

/// [a,b] x [c,d] in lattice coordinates.
struct Rectangle {
  int a = 0;
  int b = 0;
  int c = 0;
  int d = 0;
};

/// Induced subgraph of Z^2 on a finite vertex set.
///
/// Vertices are indexed in lexicographic (x, y) order and edges are numbered by
/// scanning vertices in index order and emitting the +x edge before the +y
/// edge. Both indexings depend only on the vertex set. Immutable once built.
class LatticeGraph {
 public:
  /// Lambda_N(center) = center + [-N, N]^2.
  static LatticeGraph box(int n, Site center = {});
  /// Lambda_n \ Lambda_m around `center`, with induced edges. Requires 0 < m < n.
  static LatticeGraph annulus(int m, int n, Site center = {});
  /// [x0, x1] x [y0, y1].
  static LatticeGraph rectangle(int x0, int x1, int y0, int y1);
  /// Lambda_N(center) restricted to the sites accepted by `keep`. Used for
  /// general domains between Lambda_N and Lambda_2N.
  static LatticeGraph masked_box(int n, Site center, const std::function<bool(Site)>& keep);
  /// Induced subgraph on an arbitrary site list (duplicates are rejected).
  static LatticeGraph from_sites(std::vector<Site> sites, int side = 0, Site origin = {});

  [[nodiscard]] std::size_t vertex_count() const { return sites_.size(); }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] int side() const { return side_; }
  [[nodiscard]] Site origin() const { return origin_; }

  [[nodiscard]] const Site& site(int v) const { return sites_[static_cast<std::size_t>(v)]; }
  [[nodiscard]] std::span<const Site> sites() const { return sites_; }
  [[nodiscard]] std::pair<int, int> edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  [[nodiscard]] std::span<const std::pair<int, int>> edges() const { return edges_; }
  [[nodiscard]] std::optional<int> index_of(Site s) const;
  [[nodiscard]] bool contains(Site s) const { return index_of(s).has_value(); }
  [[nodiscard]] bool contains(const Rectangle& r) const;

  [[nodiscard]] std::span<const Neighbor> neighbors(int v) const;

  /// Vertices of G with a neighbour outside G, in index order.
  [[nodiscard]] std::span<const int> interior_boundary() const { return interior_boundary_; }
  /// Sites of G^c adjacent to G, sorted lexicographically.
  [[nodiscard]] std::span<const Site> exterior_boundary() const { return exterior_boundary_; }
  /// Positions in exterior_boundary() of the outside neighbours of v.
  [[nodiscard]] std::span<const int> exterior_neighbors(int v) const;

  [[nodiscard]] bool is_interior_boundary(int v) const {
    return on_interior_boundary_[static_cast<std::size_t>(v)] != 0;
  }

  /// l_inf diameter of the vertex set.
  [[nodiscard]] int diameter() const;

  [[nodiscard]] PrimalEdge primal_edge(int e) const;
  [[nodiscard]] DualEdge dual_edge(int e) const { return dual_of(primal_edge(e)); }
  /// Edge index of the primal edge crossed by `d`, if that edge belongs to G.
  [[nodiscard]] std::optional<int> edge_crossed_by(const DualEdge& d) const;
  [[nodiscard]] std::optional<int> edge_index(Site u, Site v) const;

  /// {"n":..., "vertices":[[x,y],...], "edges":[[i,j],...]}
  [[nodiscard]] std::string to_json() const;

 private:
  LatticeGraph() = default;
  void finalize();

  std::vector<Site> sites_;
  std::vector<std::pair<int, int>> edges_;
  int side_ = 0;
  Site origin_{};

  int min_x_ = 0, min_y_ = 0, width_ = 0, height_ = 0;
  std::vector<int> grid_;

  std::vector<int> adj_offsets_;
  std::vector<Neighbor> adj_;

  std::vector<int> interior_boundary_;
  std::vector<std::uint8_t> on_interior_boundary_;
  std::vector<Site> exterior_boundary_;
  std::vector<int> ext_offsets_;
  std::vector<int> ext_;
};

/// Spin boundary values for the Ising model, or a wiring of the interior
/// boundary for the FK model.
class BoundaryCondition {
 public:
  enum class Kind { IsingSpin, FkFree, FkWired, FkPartition };

  /// Same value (-1, 0 or +1) on every exterior boundary site.
  static BoundaryCondition ising_uniform(const LatticeGraph& g, int value);
  /// One value per exterior_boundary() site.
  static BoundaryCondition ising(const LatticeGraph& g, std::vector<std::int8_t> values);
  static BoundaryCondition fk_free();
  static BoundaryCondition fk_wired();
  /// Disjoint groups of interior-boundary vertices; each group is wired to a
  /// separate outside point.
  static BoundaryCondition fk_partition(const LatticeGraph& g, std::vector<std::vector<int>> groups);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool is_fk() const { return kind_ != Kind::IsingSpin; }
  [[nodiscard]] std::span<const std::int8_t> spin_values() const { return spins_; }

  /// Wired groups as vertex lists: empty for free, the whole interior boundary
  /// for wired, the stored groups for a partition. Empty for IsingSpin.
  [[nodiscard]] std::vector<std::vector<int>> wiring_groups(const LatticeGraph& g) const;

  /// Sum of xi_v over the outside neighbours v of every vertex.
  [[nodiscard]] std::vector<int> boundary_field(const LatticeGraph& g) const;

  /// Throws InvalidParameter/InvalidPartition if inconsistent with g.
  void validate(const LatticeGraph& g) const;

  [[nodiscard]] std::string name() const;

 private:
  Kind kind_ = Kind::FkFree;
  std::vector<std::int8_t> spins_;
  std::vector<std::vector<int>> groups_;
};

/// Parses free|wired|plus|minus|zero. Spin names need the graph for sizing.
BoundaryCondition parse_boundary(const std::string& name, const LatticeGraph& g);

}  // namespace rffkim
