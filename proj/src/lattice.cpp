#include "rffkim/lattice.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <json.hpp>

#include "rffkim/errors.hpp"

namespace rffkim {

namespace {

constexpr int kMaxSide = 1 << 12;

constexpr Site kSteps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

}  // namespace

PrimalEdge make_primal_edge(Site u, Site v) {
  if (linf_distance(u, v) != 1 || (u.x != v.x && u.y != v.y)) {
    throw InvalidGeometry("sites are not nearest neighbours");
  }
  return u < v ? PrimalEdge{u, v} : PrimalEdge{v, u};
}

DualEdge make_dual_edge(DualSite u, DualSite v) {
  const int dx = std::abs(u.x - v.x);
  const int dy = std::abs(u.y - v.y);
  if (dx + dy != 1) throw InvalidGeometry("dual sites are not nearest neighbours");
  return u < v ? DualEdge{u, v} : DualEdge{v, u};
}

DualEdge dual_of(const PrimalEdge& e) {
  if (e.a.y == e.b.y) {
    // {(x,y),(x+1,y)} -> {(x+1/2, y-1/2), (x+1/2, y+1/2)}
    return DualEdge{{e.a.x, e.a.y - 1}, {e.a.x, e.a.y}};
  }
  // {(x,y),(x,y+1)} -> {(x-1/2, y+1/2), (x+1/2, y+1/2)}
  return DualEdge{{e.a.x - 1, e.a.y}, {e.a.x, e.a.y}};
}

PrimalEdge primal_of(const DualEdge& e) {
  if (e.a.x == e.b.x) {
    return PrimalEdge{{e.a.x, e.a.y + 1}, {e.a.x + 1, e.a.y + 1}};
  }
  return PrimalEdge{{e.a.x + 1, e.a.y}, {e.a.x + 1, e.a.y + 1}};
}

LatticeGraph LatticeGraph::box(int n, Site center) {
  if (n < 0) throw InvalidGeometry("box half-side must be non-negative");
  if (n > kMaxSide) throw GuardError("box half-side exceeds limit " + std::to_string(kMaxSide));
  std::vector<Site> sites;
  sites.reserve(static_cast<std::size_t>(2 * n + 1) * static_cast<std::size_t>(2 * n + 1));
  for (int x = -n; x <= n; ++x) {
    for (int y = -n; y <= n; ++y) sites.push_back({center.x + x, center.y + y});
  }
  return from_sites(std::move(sites), n, center);
}

LatticeGraph LatticeGraph::annulus(int m, int n, Site center) {
  if (m <= 0 || m >= n) {
    throw InvalidGeometry("annulus requires 0 < m < n (got m=" + std::to_string(m) +
                          ", n=" + std::to_string(n) + ")");
  }
  return masked_box(n, center, [&](Site s) {
    return linf_distance(s, center) > m;
  });
}

LatticeGraph LatticeGraph::rectangle(int x0, int x1, int y0, int y1) {
  if (x0 > x1 || y0 > y1) throw InvalidGeometry("empty rectangle");
  std::vector<Site> sites;
  for (int x = x0; x <= x1; ++x) {
    for (int y = y0; y <= y1; ++y) sites.push_back({x, y});
  }
  return from_sites(std::move(sites), 0, {x0, y0});
}

LatticeGraph LatticeGraph::masked_box(int n, Site center, const std::function<bool(Site)>& keep) {
  if (n < 0) throw InvalidGeometry("box half-side must be non-negative");
  std::vector<Site> sites;
  for (int x = -n; x <= n; ++x) {
    for (int y = -n; y <= n; ++y) {
      const Site s{center.x + x, center.y + y};
      if (keep(s)) sites.push_back(s);
    }
  }
  return from_sites(std::move(sites), n, center);
}

LatticeGraph LatticeGraph::from_sites(std::vector<Site> sites, int side, Site origin) {
  LatticeGraph g;
  std::sort(sites.begin(), sites.end());
  if (std::adjacent_find(sites.begin(), sites.end()) != sites.end()) {
    throw InvalidGeometry("duplicate site in vertex list");
  }
  g.sites_ = std::move(sites);
  g.side_ = side;
  g.origin_ = origin;
  g.finalize();
  return g;
}

void LatticeGraph::finalize() {
  if (!sites_.empty()) {
    int max_x = std::numeric_limits<int>::min(), max_y = std::numeric_limits<int>::min();
    min_x_ = std::numeric_limits<int>::max();
    min_y_ = std::numeric_limits<int>::max();
    for (const auto& s : sites_) {
      min_x_ = std::min(min_x_, s.x);
      min_y_ = std::min(min_y_, s.y);
      max_x = std::max(max_x, s.x);
      max_y = std::max(max_y, s.y);
    }
    width_ = max_x - min_x_ + 1;
    height_ = max_y - min_y_ + 1;
  }
  grid_.assign(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), -1);
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const auto& s = sites_[i];
    grid_[static_cast<std::size_t>(s.x - min_x_) * static_cast<std::size_t>(height_) +
          static_cast<std::size_t>(s.y - min_y_)] = static_cast<int>(i);
  }

  edges_.clear();
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const auto& s = sites_[i];
    if (auto j = index_of({s.x + 1, s.y})) edges_.emplace_back(static_cast<int>(i), *j);
    if (auto j = index_of({s.x, s.y + 1})) edges_.emplace_back(static_cast<int>(i), *j);
  }

  const std::size_t nv = sites_.size();
  std::vector<std::vector<Neighbor>> adj(nv);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    adj[static_cast<std::size_t>(u)].push_back({v, static_cast<int>(e)});
    adj[static_cast<std::size_t>(v)].push_back({u, static_cast<int>(e)});
  }
  adj_offsets_.assign(nv + 1, 0);
  adj_.clear();
  for (std::size_t v = 0; v < nv; ++v) {
    auto& list = adj[v];
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
    adj_.insert(adj_.end(), list.begin(), list.end());
    adj_offsets_[v + 1] = static_cast<int>(adj_.size());
  }

  std::set<Site> outside;
  on_interior_boundary_.assign(nv, 0);
  interior_boundary_.clear();
  for (std::size_t v = 0; v < nv; ++v) {
    bool boundary = false;
    for (const auto& step : kSteps) {
      const Site t{sites_[v].x + step.x, sites_[v].y + step.y};
      if (!contains(t)) {
        outside.insert(t);
        boundary = true;
      }
    }
    if (boundary) {
      on_interior_boundary_[v] = 1;
      interior_boundary_.push_back(static_cast<int>(v));
    }
  }
  exterior_boundary_.assign(outside.begin(), outside.end());
  ext_offsets_.assign(nv + 1, 0);
  ext_.clear();
  for (std::size_t v = 0; v < nv; ++v) {
    std::vector<int> mine;
    for (const auto& step : kSteps) {
      const Site t{sites_[v].x + step.x, sites_[v].y + step.y};
      if (!contains(t)) {
        auto it = std::lower_bound(exterior_boundary_.begin(), exterior_boundary_.end(), t);
        mine.push_back(static_cast<int>(it - exterior_boundary_.begin()));
      }
    }
    std::sort(mine.begin(), mine.end());
    ext_.insert(ext_.end(), mine.begin(), mine.end());
    ext_offsets_[v + 1] = static_cast<int>(ext_.size());
  }
}

std::optional<int> LatticeGraph::index_of(Site s) const {
  const int dx = s.x - min_x_;
  const int dy = s.y - min_y_;
  if (dx < 0 || dy < 0 || dx >= width_ || dy >= height_) return std::nullopt;
  const int v = grid_[static_cast<std::size_t>(dx) * static_cast<std::size_t>(height_) +
                      static_cast<std::size_t>(dy)];
  if (v < 0) return std::nullopt;
  return v;
}

bool LatticeGraph::contains(const Rectangle& r) const {
  if (r.a > r.b || r.c > r.d) return false;
  for (int x = r.a; x <= r.b; ++x) {
    for (int y = r.c; y <= r.d; ++y) {
      if (!contains(Site{x, y})) return false;
    }
  }
  return true;
}

std::span<const Neighbor> LatticeGraph::neighbors(int v) const {
  const auto b = static_cast<std::size_t>(adj_offsets_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(adj_offsets_[static_cast<std::size_t>(v) + 1]);
  return std::span<const Neighbor>(adj_).subspan(b, e - b);
}

std::span<const int> LatticeGraph::exterior_neighbors(int v) const {
  const auto b = static_cast<std::size_t>(ext_offsets_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(ext_offsets_[static_cast<std::size_t>(v) + 1]);
  return std::span<const int>(ext_).subspan(b, e - b);
}

int LatticeGraph::diameter() const {
  if (sites_.empty()) return 0;
  return std::max(width_, height_) - 1;
}

PrimalEdge LatticeGraph::primal_edge(int e) const {
  const auto [u, v] = edge(e);
  return PrimalEdge{site(u), site(v)};
}

std::optional<int> LatticeGraph::edge_index(Site u, Site v) const {
  const auto iu = index_of(u);
  const auto iv = index_of(v);
  if (!iu || !iv) return std::nullopt;
  for (const auto& nb : neighbors(*iu)) {
    if (nb.vertex == *iv) return nb.edge;
  }
  return std::nullopt;
}

std::optional<int> LatticeGraph::edge_crossed_by(const DualEdge& d) const {
  const auto p = primal_of(d);
  return edge_index(p.a, p.b);
}

std::string LatticeGraph::to_json() const {
  nlohmann::json j;
  j["n"] = side_;
  auto verts = nlohmann::json::array();
  for (const auto& s : sites_) verts.push_back({s.x, s.y});
  auto eds = nlohmann::json::array();
  for (const auto& [u, v] : edges_) eds.push_back({u, v});
  j["vertices"] = std::move(verts);
  j["edges"] = std::move(eds);
  return j.dump();
}

// ---------------------------------------------------------------------------

BoundaryCondition BoundaryCondition::ising_uniform(const LatticeGraph& g, int value) {
  if (value < -1 || value > 1) throw InvalidParameter("spin boundary value must be -1, 0 or +1");
  return ising(g, std::vector<std::int8_t>(g.exterior_boundary().size(), static_cast<std::int8_t>(value)));
}

BoundaryCondition BoundaryCondition::ising(const LatticeGraph& g, std::vector<std::int8_t> values) {
  BoundaryCondition bc;
  bc.kind_ = Kind::IsingSpin;
  bc.spins_ = std::move(values);
  bc.validate(g);
  return bc;
}

BoundaryCondition BoundaryCondition::fk_free() {
  BoundaryCondition bc;
  bc.kind_ = Kind::FkFree;
  return bc;
}

BoundaryCondition BoundaryCondition::fk_wired() {
  BoundaryCondition bc;
  bc.kind_ = Kind::FkWired;
  return bc;
}

BoundaryCondition BoundaryCondition::fk_partition(const LatticeGraph& g, std::vector<std::vector<int>> groups) {
  BoundaryCondition bc;
  bc.kind_ = Kind::FkPartition;
  for (auto& grp : groups) std::sort(grp.begin(), grp.end());
  bc.groups_ = std::move(groups);
  bc.validate(g);
  return bc;
}

std::vector<std::vector<int>> BoundaryCondition::wiring_groups(const LatticeGraph& g) const {
  switch (kind_) {
    case Kind::FkWired: {
      const auto ib = g.interior_boundary();
      if (ib.empty()) return {};
      return {std::vector<int>(ib.begin(), ib.end())};
    }
    case Kind::FkPartition:
      return groups_;
    default:
      return {};
  }
}

std::vector<int> BoundaryCondition::boundary_field(const LatticeGraph& g) const {
  std::vector<int> out(g.vertex_count(), 0);
  if (kind_ != Kind::IsingSpin) return out;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    for (int k : g.exterior_neighbors(static_cast<int>(v))) out[v] += spins_[static_cast<std::size_t>(k)];
  }
  return out;
}

void BoundaryCondition::validate(const LatticeGraph& g) const {
  if (kind_ == Kind::IsingSpin) {
    if (spins_.size() != g.exterior_boundary().size()) {
      throw InvalidParameter("spin boundary must assign a value to every exterior boundary site");
    }
    for (auto s : spins_) {
      if (s < -1 || s > 1) throw InvalidParameter("spin boundary value must be -1, 0 or +1");
    }
    return;
  }
  if (kind_ != Kind::FkPartition) return;
  std::vector<std::uint8_t> used(g.vertex_count(), 0);
  for (const auto& grp : groups_) {
    if (grp.empty()) throw InvalidPartition("partition group is empty");
    for (int v : grp) {
      if (v < 0 || static_cast<std::size_t>(v) >= g.vertex_count()) {
        throw InvalidPartition("partition vertex out of range");
      }
      if (!g.is_interior_boundary(v)) {
        throw InvalidPartition("partition vertex " + std::to_string(v) + " is not on the interior boundary");
      }
      if (used[static_cast<std::size_t>(v)]) {
        throw InvalidPartition("partition groups overlap at vertex " + std::to_string(v));
      }
      used[static_cast<std::size_t>(v)] = 1;
    }
  }
}

std::string BoundaryCondition::name() const {
  switch (kind_) {
    case Kind::FkFree:
      return "free";
    case Kind::FkWired:
      return "wired";
    case Kind::FkPartition:
      return "partition";
    case Kind::IsingSpin:
      break;
  }
  if (!spins_.empty() && std::all_of(spins_.begin(), spins_.end(), [&](auto s) { return s == spins_.front(); })) {
    return spins_.front() > 0 ? "plus" : spins_.front() < 0 ? "minus" : "zero";
  }
  return spins_.empty() ? "zero" : "spin";
}

BoundaryCondition parse_boundary(const std::string& name, const LatticeGraph& g) {
  if (name == "free") return BoundaryCondition::fk_free();
  if (name == "wired") return BoundaryCondition::fk_wired();
  if (name == "plus") return BoundaryCondition::ising_uniform(g, 1);
  if (name == "minus") return BoundaryCondition::ising_uniform(g, -1);
  if (name == "zero") return BoundaryCondition::ising_uniform(g, 0);
  throw InvalidParameter("unknown boundary condition '" + name + "'");
}

}  // namespace rffkim
