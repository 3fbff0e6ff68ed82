#include "rffkim/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "rffkim/disjoint_set.hpp"
#include "rffkim/errors.hpp"

namespace rffkim {

namespace {

void check_omega(const EdgeConfig& omega, const LatticeGraph& g) {
  if (omega.size() != g.edge_count()) throw InvalidParameter("edge configuration length does not match graph");
}

ClusterDecomposition label_clusters(DisjointSet& ds, const LatticeGraph& g, const std::vector<std::uint8_t>& wired) {
  ClusterDecomposition d;
  const std::size_t nv = g.vertex_count();
  d.label.assign(nv, -1);
  std::vector<int> root_label(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    const int r = ds.find(static_cast<int>(v));
    if (root_label[static_cast<std::size_t>(r)] < 0) {
      root_label[static_cast<std::size_t>(r)] = static_cast<int>(d.clusters.size());
      d.clusters.emplace_back();
    }
    const int c = root_label[static_cast<std::size_t>(r)];
    d.label[v] = c;
    auto& cl = d.clusters[static_cast<std::size_t>(c)];
    cl.members.push_back(static_cast<int>(v));
    if (g.is_interior_boundary(static_cast<int>(v))) cl.touches_boundary = true;
    if (wired[v]) cl.boundary = true;
  }
  std::size_t best = 0;
  for (std::size_t c = 0; c < d.clusters.size(); ++c) {
    if (d.clusters[c].size() > best) {
      best = d.clusters[c].size();
      d.maximal = static_cast<int>(c);
    }
    if (d.boundary_cluster < 0 && d.clusters[c].boundary) d.boundary_cluster = static_cast<int>(c);
  }
  return d;
}

}  // namespace

ClusterDecomposition decompose(const EdgeConfig& omega, const LatticeGraph& g,
                               const std::vector<std::vector<int>>& wiring) {
  check_omega(omega, g);
  DisjointSet ds(g.vertex_count());
  std::vector<std::uint8_t> wired(g.vertex_count(), 0);
  for (const auto& group : wiring) {
    for (std::size_t k = 0; k < group.size(); ++k) {
      const int v = group[k];
      if (v < 0 || static_cast<std::size_t>(v) >= g.vertex_count()) throw InvalidPartition("wiring vertex out of range");
      wired[static_cast<std::size_t>(v)] = 1;
      if (k > 0) ds.unite(group[0], v);
    }
  }
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (omega[e]) ds.unite(edges[e].first, edges[e].second);
  }
  return label_clusters(ds, g, wired);
}

ClusterDecomposition decompose(const EdgeConfig& omega, const LatticeGraph& g, const BoundaryCondition& gamma) {
  if (!gamma.is_fk()) throw InvalidParameter("cluster decomposition needs an FK boundary condition");
  return decompose(omega, g, gamma.wiring_groups(g));
}

double log_cosh(double x) {
  const double a = std::fabs(x);
  if (a < 1e-4) {
    const double x2 = x * x;
    return x2 / 2.0 - x2 * x2 / 12.0;
  }
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

std::vector<double> cluster_field_sums(const ClusterDecomposition& d, const DisorderField& field) {
  if (field.size() != d.label.size()) throw InvalidParameter("field size does not match graph");
  std::vector<double> out(d.clusters.size(), 0.0);
  for (std::size_t c = 0; c < d.clusters.size(); ++c) {
    double s = 0.0;
    for (int v : d.clusters[c].members) s += field.values[static_cast<std::size_t>(v)];
    out[c] = s;
  }
  return out;
}

double f_functional(const ClusterDecomposition& d, const DisorderField& field, double t) {
  if (!(t > 0.0)) throw InvalidParameter("temperature must be positive");
  if (field.epsilon == 0.0) return 0.0;
  double f = 0.0;
  for (double h : cluster_field_sums(d, field)) f += log_cosh(field.epsilon * h / t);
  return f;
}

ClusterStats cluster_stats(const ClusterDecomposition& d, const DisorderField* field, double t) {
  ClusterStats s;
  s.kappa = static_cast<std::int64_t>(d.clusters.size());
  for (const auto& c : d.clusters) {
    const auto n = static_cast<std::int64_t>(c.size());
    if (n > s.max_size) {
      s.second_size = s.max_size;
      s.max_size = n;
    } else if (n > s.second_size) {
      s.second_size = n;
    }
    s.sum_sq += n * n;
    s.sum_quartic += n * n * n * n;
  }
  if (d.boundary_cluster >= 0) {
    s.boundary_size = static_cast<std::int64_t>(d.clusters[static_cast<std::size_t>(d.boundary_cluster)].size());
    s.boundary_is_maximal = s.boundary_size == s.max_size;
  }
  if (field != nullptr && field->epsilon != 0.0) {
    if (!(t > 0.0)) throw InvalidParameter("temperature must be positive");
    for (double h : cluster_field_sums(d, *field)) {
      const double x = field->epsilon * h / t;
      const double x2 = x * x;
      s.f_value += log_cosh(x);
      s.moment2 += x2 / 2.0;
      s.moment4 += x2 * x2 / 2.0;
    }
  }
  return s;
}

namespace {

bool open_between(const EdgeConfig& omega, const LatticeGraph& g, Site u, Site v) {
  const auto e = g.edge_index(u, v);
  return e && omega[static_cast<std::size_t>(*e)] != 0;
}

/// Breadth-first search on a width x height grid of nodes (column i, row j).
template <class Step, class IsStart, class IsGoal>
bool grid_search(int width, int height, IsStart is_start, IsGoal is_goal, Step passable) {
  if (width <= 0 || height <= 0) return false;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  std::deque<std::pair<int, int>> queue;
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(i) * static_cast<std::size_t>(height) + static_cast<std::size_t>(j); };
  for (int i = 0; i < width; ++i) {
    for (int j = 0; j < height; ++j) {
      if (is_start(i, j)) {
        seen[idx(i, j)] = 1;
        queue.emplace_back(i, j);
      }
    }
  }
  static constexpr int kDx[4] = {1, -1, 0, 0};
  static constexpr int kDy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    if (is_goal(i, j)) return true;
    for (int k = 0; k < 4; ++k) {
      const int ni = i + kDx[k], nj = j + kDy[k];
      if (ni < 0 || nj < 0 || ni >= width || nj >= height || seen[idx(ni, nj)]) continue;
      if (!passable(i, j, ni, nj)) continue;
      seen[idx(ni, nj)] = 1;
      queue.emplace_back(ni, nj);
    }
  }
  return false;
}

}  // namespace

Crossings crossing_events(const EdgeConfig& omega, const LatticeGraph& g, const Rectangle& r) {
  check_omega(omega, g);
  if (r.a > r.b || r.c > r.d) throw InvalidGeometry("rectangle corners out of order");
  if (!g.contains(r)) throw InvalidGeometry("rectangle not contained in graph");
  const int w = r.b - r.a + 1, h = r.d - r.c + 1;
  Crossings out;

  auto primal_step = [&](int i, int j, int ni, int nj) {
    return open_between(omega, g, {r.a + i, r.c + j}, {r.a + ni, r.c + nj});
  };
  out.horizontal = grid_search(
      w, h, [](int i, int) { return i == 0; }, [&](int i, int) { return i == w - 1; }, primal_step);
  out.vertical = grid_search(
      w, h, [](int, int j) { return j == 0; }, [&](int, int j) { return j == h - 1; }, primal_step);

  // Horizontal dual crossing: node (i, j) is the dual site (a - 1 + i + 1/2, c + j + 1/2).
  {
    const int dw = w + 1, dh = h - 1;
    auto step = [&](int i, int j, int ni, int nj) {
      const int x = r.a - 1 + std::min(i, ni);
      const int y = r.c + std::min(j, nj);
      if (j == nj) {
        // crosses the vertical primal edge (x+1, y)-(x+1, y+1)
        return !open_between(omega, g, {x + 1, y}, {x + 1, y + 1});
      }
      // crosses the horizontal primal edge (x, y+1)-(x+1, y+1); only strictly inside R
      if (x < r.a || x + 1 > r.b) return false;
      return !open_between(omega, g, {x, y + 1}, {x + 1, y + 1});
    };
    out.horizontal_dual = grid_search(
        dw, dh, [](int i, int) { return i == 0; }, [&](int i, int) { return i == dw - 1; }, step);
  }
  // Vertical dual crossing: node (i, j) is the dual site (a + i + 1/2, c - 1 + j + 1/2).
  {
    const int dw = w - 1, dh = h + 1;
    auto step = [&](int i, int j, int ni, int nj) {
      const int x = r.a + std::min(i, ni);
      const int y = r.c - 1 + std::min(j, nj);
      if (i == ni) {
        // crosses the horizontal primal edge (x, y+1)-(x+1, y+1)
        return !open_between(omega, g, {x, y + 1}, {x + 1, y + 1});
      }
      if (y < r.c || y + 1 > r.d) return false;
      return !open_between(omega, g, {x + 1, y}, {x + 1, y + 1});
    };
    out.vertical_dual = grid_search(
        dw, dh, [](int, int j) { return j == 0; }, [&](int, int j) { return j == dh - 1; }, step);
  }
  return out;
}

namespace {

void check_block_geometry(const LatticeGraph& g, int m) {
  const int n = g.side();
  const auto full = static_cast<std::size_t>(2 * n + 1);
  if (n < 1 || g.vertex_count() != full * full) throw InvalidPartition("block partition needs a full box Lambda_N");
  if (m < 1) throw InvalidPartition("block half-size M must be positive");
  if (n % (2 * m) != 0) {
    throw InvalidPartition("N=" + std::to_string(n) + " is not divisible by 2M=" + std::to_string(2 * m));
  }
}

}  // namespace

std::vector<Site> block_centers(const LatticeGraph& g, int m) {
  check_block_geometry(g, m);
  const int n = g.side();
  const int per_axis = n / (2 * m);
  const Site c = g.origin();
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(per_axis) * static_cast<std::size_t>(per_axis));
  for (int kx = 0; kx < per_axis; ++kx) {
    for (int ky = 0; ky < per_axis; ++ky) {
      out.push_back({c.x - n + 2 * m + 4 * m * kx, c.y - n + 2 * m + 4 * m * ky});
    }
  }
  return out;
}

OutmostClosedRegion outmost_closed_region(const EdgeConfig& omega, const LatticeGraph& g, int m) {
  check_omega(omega, g);
  const auto centers = block_centers(g, m);
  const auto d = decompose(omega, g, std::vector<std::vector<int>>{});
  OutmostClosedRegion out;
  out.m = m;
  std::vector<std::uint8_t> inside(d.clusters.size());
  for (const Site u : centers) {
    BlockRegion region{u, {}};
    for (std::size_t c = 0; c < d.clusters.size(); ++c) {
      inside[c] = std::all_of(d.clusters[c].members.begin(), d.clusters[c].members.end(),
                              [&](int v) { return linf_distance(g.site(v), u) <= 2 * m; });
    }
    bool covers_core = true;
    for (int x = -m; x <= m && covers_core; ++x) {
      for (int y = -m; y <= m; ++y) {
        const int v = *g.index_of({u.x + x, u.y + y});
        if (!inside[static_cast<std::size_t>(d.label[static_cast<std::size_t>(v)])]) {
          covers_core = false;
          break;
        }
      }
    }
    if (covers_core) {
      for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (inside[static_cast<std::size_t>(d.label[v])]) region.vertices.push_back(static_cast<int>(v));
      }
      ++out.eta;
    }
    out.blocks.push_back(std::move(region));
  }
  return out;
}

WellConnected well_connected(const EdgeConfig& omega, const LatticeGraph& g, int m) {
  check_omega(omega, g);
  if (m % 2 != 0) throw InvalidPartition("well-connectedness needs an even M");
  const auto centers = block_centers(g, m);
  const int n = g.side();
  const std::size_t nv = g.vertex_count();
  std::vector<std::uint8_t> in_annuli(nv, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    for (const Site u : centers) {
      const int dist = linf_distance(g.site(static_cast<int>(v)), u);
      if (dist > m && dist <= 2 * m) {
        in_annuli[v] = 1;
        break;
      }
    }
  }
  DisjointSet ds(nv);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    if (omega[e] && in_annuli[static_cast<std::size_t>(a)] && in_annuli[static_cast<std::size_t>(b)]) ds.unite(a, b);
  }
  struct Box {
    int min_x, max_x, min_y, max_y, first;
  };
  std::vector<int> slot(nv, -1);
  std::vector<Box> boxes;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!in_annuli[v]) continue;
    const int r = ds.find(static_cast<int>(v));
    const Site s = g.site(static_cast<int>(v));
    auto& k = slot[static_cast<std::size_t>(r)];
    if (k < 0) {
      k = static_cast<int>(boxes.size());
      boxes.push_back({s.x, s.x, s.y, s.y, static_cast<int>(v)});
    } else {
      auto& b = boxes[static_cast<std::size_t>(k)];
      b.min_x = std::min(b.min_x, s.x);
      b.max_x = std::max(b.max_x, s.x);
      b.min_y = std::min(b.min_y, s.y);
      b.max_y = std::max(b.max_y, s.y);
    }
  }
  WellConnected out;
  for (const auto& b : boxes) {
    const int diam = std::max(b.max_x - b.min_x, b.max_y - b.min_y);
    if (2 * diam >= n) {
      ++out.large_clusters;
      if (!out.main_cluster) out.main_cluster = b.first;
    }
  }
  out.value = out.large_clusters == 1;
  if (!out.value) out.main_cluster.reset();
  return out;
}

}  // namespace rffkim
