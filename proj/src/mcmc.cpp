#include "rffkim/mcmc.hpp"

#include <cmath>

#include "rffkim/errors.hpp"
#include "rffkim/parallel.hpp"

namespace rffkim {

ModelKind parse_model(const std::string& name) {
  if (name == "rfim" || name == "ising") return ModelKind::Rfim;
  if (name == "rffk" || name == "fk") return ModelKind::Rffk;
  throw ConfigError("unknown model '" + name + "' (expected rfim or rffk)");
}

std::string model_name(ModelKind m) { return m == ModelKind::Rfim ? "rfim" : "rffk"; }

namespace {

bool spin_mode(const ModelSpec& spec) { return spec.boundary.kind() == BoundaryCondition::Kind::IsingSpin; }

}  // namespace

void ModelSpec::validate() const {
  if (graph == nullptr) throw InvalidParameter("model has no graph");
  if (field.size() != graph->vertex_count()) throw InvalidParameter("field size does not match graph");
  if (!(field.epsilon >= 0.0)) throw InvalidParameter("epsilon must be non-negative");
  boundary.validate(*graph);
  if (model == ModelKind::Rfim && boundary.kind() != BoundaryCondition::Kind::IsingSpin &&
      boundary.kind() != BoundaryCondition::Kind::FkFree) {
    throw InvalidParameter("the heat-bath sampler needs a spin boundary (plus, minus or zero)");
  }
}

std::int64_t default_burn_in(const LatticeGraph& g, double t) {
  const std::int64_t n = std::max<std::int64_t>(1, g.side() > 0 ? g.side() : (g.diameter() + 1) / 2);
  return classify_temperature(t) == Regime::Critical ? 20 * n * n : 100 * n;
}

std::int64_t ChainPlan::effective_burn_in(const ModelSpec& spec) const {
  return burn_in >= 0 ? burn_in : default_burn_in(*spec.graph, spec.coupling.temperature());
}

std::int64_t ChainPlan::total_sweeps(const ModelSpec& spec) const {
  const double total = static_cast<double>(replicas) *
                       (static_cast<double>(effective_burn_in(spec)) + static_cast<double>(thin) * static_cast<double>(samples));
  return total > 9e18 ? INT64_MAX : static_cast<std::int64_t>(total);
}

void ChainPlan::validate(const ModelSpec& spec) const {
  if (thin < 1) throw InvalidParameter("thinning interval must be positive");
  if (samples < 0) throw InvalidParameter("sample count must be non-negative");
  if (replicas < 1) throw InvalidParameter("replica count must be positive");
  if (total_sweeps(spec) > limits::kMaxTotalSweeps) {
    throw GuardError("plan needs " + std::to_string(total_sweeps(spec)) + " sweeps, above the limit of " +
                     std::to_string(limits::kMaxTotalSweeps) + " total sweeps");
  }
}

double logistic_g(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-2.0 * t));
  const double e = std::exp(2.0 * t);
  return e / (1.0 + e);
}

ChainState initial_state(const ModelSpec& spec, std::uint64_t seed, std::uint64_t stream, bool hot) {
  spec.validate();
  const auto& g = *spec.graph;
  ChainState s;
  s.rng = CounterRng(seed, stream);
  s.sigma.assign(g.vertex_count(), -1);
  s.omega.assign(g.edge_count(), 0);
  s.ghost_bond.assign(g.vertex_count(), 0);
  if (hot) {
    for (auto& x : s.sigma) x = s.rng.uniform() < 0.5 ? 1 : -1;
    if (spec.model == ModelKind::Rffk && spec.boundary.is_fk()) {
      for (const auto& grp : spec.boundary.wiring_groups(g)) {
        for (int v : grp) s.sigma[static_cast<std::size_t>(v)] = s.sigma[static_cast<std::size_t>(grp[0])];
      }
    }
  }
  return s;
}

void rfim_heatbath_sweep(ChainState& s, const ModelSpec& spec) {
  const auto& g = *spec.graph;
  const double t = spec.coupling.temperature();
  const auto b = spec.boundary.boundary_field(g);
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    double local = b[x] + spec.field.epsilon * spec.field.values[x];
    for (const auto& nb : g.neighbors(static_cast<int>(x))) local += s.sigma[static_cast<std::size_t>(nb.vertex)];
    s.sigma[x] = s.rng.uniform() < heatbath_plus_probability(local, t) ? 1 : -1;
  }
  ++s.sweeps;
}

ClusterDecomposition state_clusters(const ChainState& s, const ModelSpec& spec) {
  const auto& g = *spec.graph;
  if (spec.model == ModelKind::Rfim) {
    EdgeConfig like(g.edge_count(), 0);
    const auto edges = g.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      like[e] = s.sigma[static_cast<std::size_t>(edges[e].first)] == s.sigma[static_cast<std::size_t>(edges[e].second)];
    }
    return decompose(like, g, std::vector<std::vector<int>>{});
  }
  if (!spin_mode(spec)) return decompose(s.omega, g, spec.boundary.wiring_groups(g));
  std::vector<std::vector<int>> groups(2);
  for (std::size_t v = 0; v < s.ghost_bond.size(); ++v) {
    if (s.ghost_bond[v] > 0) groups[0].push_back(static_cast<int>(v));
    if (s.ghost_bond[v] < 0) groups[1].push_back(static_cast<int>(v));
  }
  return decompose(s.omega, g, groups);
}

void es_sweep(ChainState& s, const ModelSpec& spec) {
  const auto& g = *spec.graph;
  const auto edges = g.edges();
  const double p = spec.coupling.p();
  const double t = spec.coupling.temperature();
  const bool ghosts = spin_mode(spec);

  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (s.omega[e] && s.sigma[static_cast<std::size_t>(edges[e].first)] != s.sigma[static_cast<std::size_t>(edges[e].second)]) {
      throw CorruptedState("open edge " + std::to_string(e) + " joins disagreeing spins");
    }
  }
  if (!ghosts) {
    for (const auto& grp : spec.boundary.wiring_groups(g)) {
      for (int v : grp) {
        if (s.sigma[static_cast<std::size_t>(v)] != s.sigma[static_cast<std::size_t>(grp[0])]) {
          throw CorruptedState("wired boundary group carries disagreeing spins");
        }
      }
    }
  }

  // edges given spins
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const bool agree =
        s.sigma[static_cast<std::size_t>(edges[e].first)] == s.sigma[static_cast<std::size_t>(edges[e].second)];
    s.omega[e] = agree && s.rng.bernoulli(p);
  }
  if (ghosts) {
    const auto xi = spec.boundary.spin_values();
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      s.ghost_bond[v] = 0;
      for (int k : g.exterior_neighbors(static_cast<int>(v))) {
        const int val = xi[static_cast<std::size_t>(k)];
        if (val != 0 && val == s.sigma[v] && s.rng.bernoulli(p)) s.ghost_bond[v] = static_cast<std::int8_t>(val);
      }
    }
  }

  // spins given edges
  const auto d = state_clusters(s, spec);
  std::vector<std::int8_t> fixed(d.clusters.size(), 0);
  if (ghosts) {
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (s.ghost_bond[v] != 0) fixed[static_cast<std::size_t>(d.label[v])] = s.ghost_bond[v];
    }
  }
  for (std::size_t c = 0; c < d.clusters.size(); ++c) {
    std::int8_t spin = fixed[c];
    if (spin == 0) {
      double h = 0.0;
      for (int v : d.clusters[c].members) h += spec.field.values[static_cast<std::size_t>(v)];
      spin = s.rng.uniform() < cluster_plus_probability(spec.field.epsilon * h / t) ? 1 : -1;
    }
    for (int v : d.clusters[c].members) s.sigma[static_cast<std::size_t>(v)] = spin;
  }
  ++s.sweeps;
}

void sweep(ChainState& s, const ModelSpec& spec) {
  if (spec.model == ModelKind::Rfim) {
    rfim_heatbath_sweep(s, spec);
  } else {
    es_sweep(s, spec);
  }
}

ExactDistribution es_transition_apply(const ExactDistribution& joint, const LatticeGraph& g, const Coupling& k,
                                      const DisorderField& field) {
  if (joint.kind != SupportKind::Joint || joint.vertex_count != g.vertex_count() || joint.edge_count != g.edge_count()) {
    throw IncompatibleDistributions("transition needs a joint table on this graph");
  }
  const std::size_t nv = g.vertex_count(), ne = g.edge_count();
  const std::uint64_t ns = std::uint64_t{1} << nv, nw = std::uint64_t{1} << ne;
  const auto edges = g.edges();
  const double p = k.p(), t = k.temperature();

  std::vector<double> pi_s(ns, 0.0);
  for (std::uint64_t c = 0; c < joint.size(); ++c) pi_s[c & (ns - 1)] += joint.probabilities[c];

  std::vector<double> nu(nw, 0.0);
  for (std::uint64_t sc = 0; sc < ns; ++sc) {
    if (pi_s[sc] == 0.0) continue;
    for (std::uint64_t wc = 0; wc < nw; ++wc) {
      double pr = pi_s[sc];
      for (std::size_t e = 0; e < ne && pr != 0.0; ++e) {
        const bool agree = !(((sc >> edges[e].first) ^ (sc >> edges[e].second)) & 1u);
        const bool open = (wc >> e) & 1u;
        pr *= agree ? (open ? p : 1.0 - p) : (open ? 0.0 : 1.0);
      }
      nu[wc] += pr;
    }
  }

  ExactDistribution out = joint;
  out.model_tag = joint.model_tag + " es-step";
  std::fill(out.probabilities.begin(), out.probabilities.end(), 0.0);
  for (std::uint64_t wc = 0; wc < nw; ++wc) {
    if (nu[wc] == 0.0) continue;
    const auto d = decompose(edges_from_code(wc, ne), g, std::vector<std::vector<int>>{});
    const auto hs = cluster_field_sums(d, field);
    for (std::uint64_t sc = 0; sc < ns; ++sc) {
      double pr = nu[wc];
      for (std::size_t c = 0; c < d.clusters.size() && pr != 0.0; ++c) {
        const auto& mem = d.clusters[c].members;
        const bool plus = (sc >> mem[0]) & 1u;
        for (int v : mem) {
          if ((((sc >> v) & 1u) != 0) != plus) {
            pr = 0.0;
            break;
          }
        }
        const double q = cluster_plus_probability(field.epsilon * hs[c] / t);
        pr *= plus ? q : 1.0 - q;
      }
      out.probabilities[sc | (wc << nv)] = pr;
    }
  }
  return out;
}

namespace {

Sample record(const ChainState& s, const ModelSpec& spec, int replica) {
  const auto& g = *spec.graph;
  Sample out;
  out.replica = replica;
  out.sweep = s.sweeps;
  const auto d = state_clusters(s, spec);
  out.stats = cluster_stats(d, &spec.field, spec.coupling.temperature());
  double m = 0.0, dot = 0.0;
  for (std::size_t v = 0; v < s.sigma.size(); ++v) {
    m += s.sigma[v];
    dot += spec.field.values[v] * s.sigma[v];
  }
  out.magnetization = s.sigma.empty() ? 0.0 : m / static_cast<double>(s.sigma.size());
  out.field_dot = spec.field.epsilon * dot / spec.coupling.temperature();
  if (const auto o = g.index_of(g.origin())) out.origin_spin = s.sigma[static_cast<std::size_t>(*o)];
  return out;
}

}  // namespace

std::vector<Sample> run_replica(const ChainPlan& plan, const ModelSpec& spec, int replica) {
  std::vector<Sample> out;
  if (plan.samples == 0) return out;
  auto s = initial_state(spec, plan.seed_base + static_cast<std::uint64_t>(replica), plan.stream, plan.hot_start);
  const std::int64_t burn = plan.effective_burn_in(spec);
  for (std::int64_t i = 0; i < burn; ++i) sweep(s, spec);
  out.reserve(static_cast<std::size_t>(plan.samples));
  for (std::int64_t k = 0; k < plan.samples; ++k) {
    for (std::int64_t i = 0; i < plan.thin; ++i) sweep(s, spec);
    auto smp = record(s, spec, replica);
    if (plan.keep_configurations) {
      smp.sigma = s.sigma;
      smp.omega = s.omega;
    }
    out.push_back(std::move(smp));
  }
  return out;
}

std::vector<Sample> run_chain(const ChainPlan& plan, const ModelSpec& spec) {
  spec.validate();
  plan.validate(spec);
  if (plan.samples == 0) return {};
  std::vector<std::vector<Sample>> per(static_cast<std::size_t>(plan.replicas));
  parallel_for(per.size(), [&](std::size_t r) { per[r] = run_replica(plan, spec, static_cast<int>(r)); });
  std::vector<Sample> out;
  out.reserve(per.size() * static_cast<std::size_t>(plan.samples));
  for (auto& v : per) {
    for (auto& x : v) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace rffkim
