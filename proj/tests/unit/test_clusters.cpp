#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "oracles/path_search.hpp"
#include "oracles/region_search.hpp"
#include "rffkim/clusters.hpp"
#include "rffkim/errors.hpp"
#include "rffkim/mcmc.hpp"
#include "rffkim/rng.hpp"

using namespace rffkim;

namespace {

EdgeConfig random_edges(const LatticeGraph& g, double p, std::uint64_t seed) {
  CounterRng rng(seed, 99);
  EdgeConfig w(g.edge_count());
  for (auto& x : w) x = rng.bernoulli(p);
  return w;
}

/// Component labels by breadth-first search over open edges, with an
/// optional ghost node joined to every wired vertex.
std::vector<int> bfs_components(const EdgeConfig& w, const LatticeGraph& g, const std::vector<int>& wired, int* count) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<int>> adj(n + 1);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (w[e]) {
      adj[static_cast<std::size_t>(edges[e].first)].push_back(edges[e].second);
      adj[static_cast<std::size_t>(edges[e].second)].push_back(edges[e].first);
    }
  }
  for (int v : wired) {
    adj[n].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(static_cast<int>(n));
  }
  std::vector<int> comp(n + 1, -1);
  int c = 0;
  for (std::size_t s = 0; s <= n; ++s) {
    if (comp[s] >= 0 || (s == n && wired.empty())) continue;
    std::queue<int> q;
    q.push(static_cast<int>(s));
    comp[s] = c;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int u : adj[static_cast<std::size_t>(v)]) {
        if (comp[static_cast<std::size_t>(u)] < 0) {
          comp[static_cast<std::size_t>(u)] = c;
          q.push(u);
        }
      }
    }
    ++c;
  }
  *count = c;
  comp.resize(n);
  return comp;
}

}  // namespace

TEST(Decompose, LambdaOneExamples) {
  const auto g = LatticeGraph::box(1);
  const EdgeConfig closed(12, 0), open(12, 1);
  const auto free_closed = decompose(closed, g, BoundaryCondition::fk_free());
  EXPECT_EQ(free_closed.kappa(), 9u);
  for (const auto& c : free_closed.clusters) EXPECT_EQ(c.size(), 1u);
  const auto wired_closed = decompose(closed, g, BoundaryCondition::fk_wired());
  ASSERT_EQ(wired_closed.kappa(), 2u);
  std::vector<std::size_t> sizes{wired_closed.clusters[0].size(), wired_closed.clusters[1].size()};
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 8}));
  EXPECT_TRUE(wired_closed.clusters[static_cast<std::size_t>(wired_closed.boundary_cluster)].boundary);
  const auto free_open = decompose(open, g, BoundaryCondition::fk_free());
  EXPECT_EQ(free_open.kappa(), 1u);
  EXPECT_EQ(free_open.clusters[0].size(), 9u);
}

TEST(Decompose, OrderedBySmallestMember) {
  const auto g = LatticeGraph::box(3);
  const auto d = decompose(random_edges(g, 0.4, 1), g, BoundaryCondition::fk_free());
  for (std::size_t c = 1; c < d.clusters.size(); ++c) EXPECT_LT(d.clusters[c - 1].members[0], d.clusters[c].members[0]);
}

TEST(Decompose, AgreesWithBreadthFirstSearchAndEuler) {
  const auto g = LatticeGraph::box(3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto w = random_edges(g, 0.5, seed);
    const std::size_t open = static_cast<std::size_t>(std::count(w.begin(), w.end(), 1));
    for (bool wired : {false, true}) {
      const auto gamma = wired ? BoundaryCondition::fk_wired() : BoundaryCondition::fk_free();
      const auto d = decompose(w, g, gamma);
      std::vector<int> wv;
      if (wired) wv.assign(g.interior_boundary().begin(), g.interior_boundary().end());
      int count = 0;
      const auto comp = bfs_components(w, g, wv, &count);
      EXPECT_EQ(d.kappa(), static_cast<std::size_t>(count));
      for (std::size_t u = 0; u < g.vertex_count(); ++u) {
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
          EXPECT_EQ(d.connected(static_cast<int>(u), static_cast<int>(v)), comp[u] == comp[v]);
        }
      }
      // kappa = V_eff - E_eff + cycles, the ghost counting as a vertex with one edge per wired site
      const long v_eff = static_cast<long>(g.vertex_count()) + (wired ? 1 : 0);
      const long e_eff = static_cast<long>(open + wv.size());
      const long cycles = e_eff - v_eff + static_cast<long>(d.kappa());
      EXPECT_GE(cycles, 0);
      if (open == 0 && !wired) EXPECT_EQ(cycles, 0);
    }
  }
}

TEST(Decompose, WiredBoundaryIsOneCluster) {
  const auto g = LatticeGraph::box(4);
  const auto d = decompose(random_edges(g, 0.3, 5), g, BoundaryCondition::fk_wired());
  const int c = d.label[static_cast<std::size_t>(g.interior_boundary()[0])];
  for (int v : g.interior_boundary()) EXPECT_EQ(d.label[static_cast<std::size_t>(v)], c);
  EXPECT_EQ(c, d.boundary_cluster);
}

TEST(Decompose, SumOfSquaresCountsConnectedPairs) {
  const auto g = LatticeGraph::box(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = decompose(random_edges(g, 0.45, seed), g, BoundaryCondition::fk_free());
    std::int64_t pairs = 0;
    for (std::size_t u = 0; u < g.vertex_count(); ++u) {
      for (std::size_t v = 0; v < g.vertex_count(); ++v) pairs += d.connected(static_cast<int>(u), static_cast<int>(v));
    }
    const auto s = cluster_stats(d);
    EXPECT_EQ(s.sum_sq, pairs);
    EXPECT_GE(s.sum_sq, static_cast<std::int64_t>(g.vertex_count()));
    EXPECT_LE(s.max_size, static_cast<std::int64_t>(g.vertex_count()));
  }
  const auto singles = cluster_stats(decompose(EdgeConfig(g.edge_count(), 0), g, BoundaryCondition::fk_free()));
  EXPECT_EQ(singles.sum_sq, static_cast<std::int64_t>(g.vertex_count()));
}

TEST(Decompose, OpeningAnEdgeIsMonotone) {
  const auto g = LatticeGraph::box(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto w = random_edges(g, 0.4, seed);
    const auto before = cluster_stats(decompose(w, g, BoundaryCondition::fk_free()));
    for (std::size_t e = 0; e < w.size(); ++e) {
      if (w[e]) continue;
      auto w2 = w;
      w2[e] = 1;
      const auto after = cluster_stats(decompose(w2, g, BoundaryCondition::fk_free()));
      EXPECT_LE(after.kappa, before.kappa);
      EXPECT_GE(after.max_size, before.max_size);
    }
  }
}

TEST(Functional, LogCosh) {
  EXPECT_NEAR(log_cosh(1.0), 0.4337808304830271, 1e-15);
  EXPECT_NEAR(log_cosh(1e-5), 0.5e-10 - 1e-20 / 12.0, 1e-24);
  EXPECT_NEAR(log_cosh(800.0), 800.0 - std::log(2.0), 1e-12);
  EXPECT_EQ(log_cosh(0.0), 0.0);
}

TEST(Functional, FExamples) {
  const auto g = LatticeGraph::rectangle(0, 0, 0, 0);
  DisorderField f;
  f.values = {2.0};
  f.epsilon = 0.5;
  const auto d = decompose(EdgeConfig{}, g, BoundaryCondition::fk_free());
  EXPECT_NEAR(f_functional(d, f, 1.0), 0.4337808305, 1e-10);
  f.epsilon = 0.0;
  EXPECT_EQ(f_functional(d, f, 1.0), 0.0);
}

TEST(Functional, BoundsAndSymmetry) {
  const auto g = LatticeGraph::box(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto field = sample_field(g, seed, 0.05 + 0.02 * static_cast<double>(seed));
    const auto d = decompose(random_edges(g, 0.5, seed + 100), g, BoundaryCondition::fk_free());
    const double t = 1.7;
    const auto s = cluster_stats(d, &field, t);
    EXPECT_LE(s.f_value, s.moment2 + 1e-12);
    EXPECT_GE(s.f_value, s.moment2 - s.moment4 - 1e-12);
    auto flipped = field;
    for (auto& h : flipped.values) h = -h;
    EXPECT_NEAR(f_functional(d, flipped, t), s.f_value, 1e-12);
  }
}

TEST(Crossings, TrivialConfigurations) {
  const auto g = LatticeGraph::box(4);
  const Rectangle r{-2, 1, -3, 2};
  const auto open = crossing_events(EdgeConfig(g.edge_count(), 1), g, r);
  EXPECT_TRUE(open.horizontal && open.vertical);
  EXPECT_FALSE(open.horizontal_dual || open.vertical_dual);
  const auto closed = crossing_events(EdgeConfig(g.edge_count(), 0), g, r);
  EXPECT_FALSE(closed.horizontal || closed.vertical);
  EXPECT_TRUE(closed.horizontal_dual && closed.vertical_dual);
}

TEST(Crossings, DualityOnRandomConfigurations) {
  const auto g = LatticeGraph::rectangle(0, 5, 0, 7);
  const Rectangle r{1, 4, 1, 6};  // 4 x 6 sites
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto w = random_edges(g, 0.5, seed);
    const auto c = crossing_events(w, g, r);
    const auto o = oracle::crossings(w, g, r);
    EXPECT_EQ(c.horizontal, o.h);
    EXPECT_EQ(c.vertical, o.v);
    EXPECT_EQ(c.horizontal_dual, o.hd);
    EXPECT_EQ(c.vertical_dual, o.vd);
    EXPECT_EQ(c.vertical, !c.horizontal_dual);
    EXPECT_EQ(c.horizontal, !c.vertical_dual);
  }
}

TEST(Crossings, RectangleMustFit) {
  const auto g = LatticeGraph::box(1);
  EXPECT_THROW(crossing_events(EdgeConfig(12, 0), g, Rectangle{-1, 2, -1, 1}), InvalidGeometry);
}

TEST(OutmostRegion, TrivialConfigurations) {
  const auto g = LatticeGraph::box(8);
  const int m = 2;
  const auto closed = outmost_closed_region(EdgeConfig(g.edge_count(), 0), g, m);
  EXPECT_EQ(closed.blocks.size(), 4u);
  EXPECT_EQ(closed.eta, 4);
  for (const auto& b : closed.blocks) EXPECT_EQ(b.vertices.size(), 81u);
  const auto open = outmost_closed_region(EdgeConfig(g.edge_count(), 1), g, m);
  EXPECT_EQ(open.eta, 0);
  EXPECT_THROW(outmost_closed_region(EdgeConfig(g.edge_count(), 0), g, 3), InvalidPartition);
}

TEST(OutmostRegion, BlockCenters) {
  const auto g = LatticeGraph::box(8, {1, 1});
  const auto c = block_centers(g, 2);
  EXPECT_EQ(c, (std::vector<Site>{{-3, -3}, {-3, 5}, {5, -3}, {5, 5}}));
}

TEST(OutmostRegion, ClosedCircuitInsideBlock) {
  // N = 4, M = 1: open every edge, then close the dual circuit around Lambda_1(u).
  const auto g = LatticeGraph::box(4);
  EdgeConfig w(g.edge_count(), 1);
  const Site u{-2, -2};
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto [a, b] = g.edge(static_cast<int>(e));
    const bool ia = linf_distance(g.site(a), u) <= 1, ib = linf_distance(g.site(b), u) <= 1;
    if (ia != ib) w[e] = 0;
  }
  const auto r = outmost_closed_region(w, g, 1);
  ASSERT_EQ(r.blocks[0].center, u);
  EXPECT_EQ(r.blocks[0].vertices.size(), 9u);
  EXPECT_EQ(r.eta, 1);
  const auto o = oracle::maximal_region(w, g, u, 1);
  ASSERT_TRUE(o.has_value());
  EXPECT_EQ(*o, r.blocks[0].vertices);
}

TEST(OutmostRegion, MatchesExhaustiveSubsetSearch) {
  const auto g = LatticeGraph::box(4);
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto w = random_edges(g, 0.15 + 0.03 * static_cast<double>(seed), seed);
    const auto r = outmost_closed_region(w, g, 1);
    for (const auto& b : r.blocks) {
      bool unique = false;
      const auto o = oracle::maximal_region(w, g, b.center, 1, &unique);
      if (o) {
        EXPECT_TRUE(unique);
        EXPECT_EQ(*o, b.vertices);
      } else {
        EXPECT_TRUE(b.vertices.empty());
      }
    }
  }
}

TEST(WellConnected, TrivialConfigurations) {
  const auto g = LatticeGraph::box(8);
  const auto open = well_connected(EdgeConfig(g.edge_count(), 1), g, 2);
  EXPECT_TRUE(open.value);
  EXPECT_TRUE(open.main_cluster.has_value());
  EXPECT_FALSE(well_connected(EdgeConfig(g.edge_count(), 0), g, 2).value);
  EXPECT_THROW(well_connected(EdgeConfig(g.edge_count(), 0), g, 1), InvalidPartition);
}

TEST(WellConnected, SupercriticalSamples) {
  const auto g = LatticeGraph::box(32);
  ModelSpec spec;
  spec.graph = &g;
  spec.coupling = Coupling::from_p(0.9);
  spec.boundary = BoundaryCondition::fk_free();
  spec.field = sample_field(g, 0, 0.0);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = initial_state(spec, seed);
    for (int i = 0; i < 10; ++i) es_sweep(s, spec);
    hits += well_connected(s.omega, g, 4).value;
  }
  EXPECT_GE(hits, 95);
}
