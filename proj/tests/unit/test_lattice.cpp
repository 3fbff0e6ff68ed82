#include <gtest/gtest.h>

#include <set>

#include "rffkim/errors.hpp"
#include "rffkim/lattice.hpp"

using namespace rffkim;

TEST(Lattice, BoxCounts) {
  const auto g0 = LatticeGraph::box(0);
  EXPECT_EQ(g0.vertex_count(), 1u);
  EXPECT_EQ(g0.edge_count(), 0u);
  const auto g1 = LatticeGraph::box(1);
  EXPECT_EQ(g1.vertex_count(), 9u);
  EXPECT_EQ(g1.edge_count(), 12u);
  for (int n = 1; n <= 6; ++n) {
    const auto g = LatticeGraph::box(n, {3, -2});
    const auto w = static_cast<std::size_t>(2 * n + 1);
    EXPECT_EQ(g.vertex_count(), w * w);
    EXPECT_EQ(g.edge_count(), 2 * w * (w - 1));
  }
}

TEST(Lattice, EdgeCountMatchesExplicitScan) {
  const auto g = LatticeGraph::box(2);
  std::size_t count = 0;
  for (int x = -2; x <= 2; ++x) {
    for (int y = -2; y <= 2; ++y) {
      if (x + 1 <= 2) ++count;
      if (y + 1 <= 2) ++count;
    }
  }
  EXPECT_EQ(count, 40u);
  EXPECT_EQ(g.edge_count(), count);
}

TEST(Lattice, EdgesJoinUnitDistanceVertices) {
  const auto g = LatticeGraph::annulus(1, 3);
  for (const auto& [a, b] : g.edges()) {
    const auto s = g.site(a), t = g.site(b);
    EXPECT_EQ(std::abs(s.x - t.x) + std::abs(s.y - t.y), 1);
    EXPECT_LT(a, b);
  }
}

TEST(Lattice, IndexingIsLexicographic) {
  const auto g = LatticeGraph::box(1);
  EXPECT_EQ(g.site(0), (Site{-1, -1}));
  EXPECT_EQ(g.site(1), (Site{-1, 0}));
  EXPECT_EQ(g.site(3), (Site{0, -1}));
  EXPECT_EQ(g.site(8), (Site{1, 1}));
  for (std::size_t v = 0; v < g.vertex_count(); ++v) EXPECT_EQ(*g.index_of(g.site(static_cast<int>(v))), static_cast<int>(v));
}

TEST(Lattice, Determinism) {
  const auto a = LatticeGraph::box(4, {1, 2});
  const auto b = LatticeGraph::box(4, {1, 2});
  EXPECT_EQ(a.to_json(), b.to_json());
}

TEST(Lattice, AnnulusCounts) {
  EXPECT_EQ(LatticeGraph::annulus(1, 2).vertex_count(), 16u);
  EXPECT_EQ(LatticeGraph::annulus(1, 3).vertex_count(), 40u);
  EXPECT_THROW(LatticeGraph::annulus(2, 2), InvalidGeometry);
  EXPECT_THROW(LatticeGraph::annulus(0, 2), InvalidGeometry);
}

TEST(Lattice, InteriorBoundaryHas8NVertices) {
  for (int n = 1; n <= 5; ++n) {
    const auto g = LatticeGraph::box(n);
    std::size_t direct = 0;
    for (const auto& s : g.sites()) {
      if (std::abs(s.x) == n || std::abs(s.y) == n) ++direct;
    }
    EXPECT_EQ(g.interior_boundary().size(), static_cast<std::size_t>(8 * n));
    EXPECT_EQ(direct, static_cast<std::size_t>(8 * n));
  }
}

TEST(Lattice, ExteriorBoundaryIsAdjacentAndOutside) {
  const auto g = LatticeGraph::annulus(1, 3, {2, 2});
  for (const auto& s : g.exterior_boundary()) {
    EXPECT_FALSE(g.contains(s));
    bool adjacent = false;
    for (Site d : {Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}}) {
      if (g.contains(Site{s.x + d.x, s.y + d.y})) adjacent = true;
    }
    EXPECT_TRUE(adjacent);
  }
  // 4*7 sites around Lambda_3 plus the 8 hole sites at l_inf distance 1
  EXPECT_EQ(g.exterior_boundary().size(), 28u + 8u);
}

TEST(Lattice, DualEdgeOfHorizontalEdge) {
  const auto d = dual_of(make_primal_edge({0, 0}, {1, 0}));
  // (1/2, -1/2)-(1/2, 1/2) is stored as dual sites (0,-1)-(0,0)
  EXPECT_EQ(d.a, (DualSite{0, -1}));
  EXPECT_EQ(d.b, (DualSite{0, 0}));
  const auto v = dual_of(make_primal_edge({0, 0}, {0, 1}));
  EXPECT_EQ(v.a, (DualSite{-1, 0}));
  EXPECT_EQ(v.b, (DualSite{0, 0}));
}

TEST(Lattice, DualIsInvolutiveAndInjective) {
  const auto g = LatticeGraph::box(1);
  std::set<DualEdge> seen;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto d = g.dual_edge(static_cast<int>(e));
    EXPECT_EQ(primal_of(d), g.primal_edge(static_cast<int>(e)));
    EXPECT_EQ(*g.edge_crossed_by(d), static_cast<int>(e));
    seen.insert(d);
  }
  EXPECT_EQ(seen.size(), 12u);
}

TEST(Lattice, JsonDump) {
  const auto g = LatticeGraph::box(0);
  EXPECT_EQ(g.to_json(), R"({"edges":[],"n":0,"vertices":[[0,0]]})");
}

TEST(Lattice, MaskedBoxKeepsSelectedSites) {
  const auto g = LatticeGraph::masked_box(2, {}, [](Site s) { return s.x + s.y >= 0; });
  for (const auto& s : g.sites()) EXPECT_GE(s.x + s.y, 0);
  EXPECT_EQ(g.vertex_count(), 15u);
}

TEST(Boundary, WiredGroupIsInteriorBoundary) {
  const auto g = LatticeGraph::box(1);
  const auto groups = BoundaryCondition::fk_wired().wiring_groups(g);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].size(), 8u);
}

TEST(Boundary, PartitionValidation) {
  const auto g = LatticeGraph::box(2);
  const auto ib = g.interior_boundary();
  EXPECT_NO_THROW(BoundaryCondition::fk_partition(g, {{ib[0], ib[1]}, {ib[2]}}));
  EXPECT_THROW(BoundaryCondition::fk_partition(g, {{ib[0], ib[1]}, {ib[1]}}), InvalidPartition);
  const int center = *g.index_of({0, 0});
  EXPECT_THROW(BoundaryCondition::fk_partition(g, {{center}}), InvalidPartition);
}

TEST(Boundary, SpinBoundaryField) {
  const auto g = LatticeGraph::box(1);
  const auto plus = BoundaryCondition::ising_uniform(g, 1);
  const auto b = plus.boundary_field(g);
  EXPECT_EQ(b[static_cast<std::size_t>(*g.index_of({-1, -1}))], 2);
  EXPECT_EQ(b[static_cast<std::size_t>(*g.index_of({0, -1}))], 1);
  EXPECT_EQ(b[static_cast<std::size_t>(*g.index_of({0, 0}))], 0);
  EXPECT_EQ(plus.spin_values().size(), g.exterior_boundary().size());
}

TEST(Boundary, Parse) {
  const auto g = LatticeGraph::box(1);
  EXPECT_EQ(parse_boundary("free", g).kind(), BoundaryCondition::Kind::FkFree);
  EXPECT_EQ(parse_boundary("wired", g).kind(), BoundaryCondition::Kind::FkWired);
  EXPECT_EQ(parse_boundary("minus", g).spin_values()[0], -1);
  EXPECT_EQ(parse_boundary("zero", g).spin_values()[0], 0);
  EXPECT_THROW(parse_boundary("bogus", g), Error);
}
