#include "rffkim/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rffkim/disjoint_set.hpp"
#include "rffkim/errors.hpp"
#include "rffkim/format.hpp"
#include "rffkim/parallel.hpp"

namespace rffkim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kChunk = 1u << 12;

struct Lse {
  double max = kNegInf;
  double sum = 0.0;  // sum of exp(x - max)

  void add(double x) {
    if (x == kNegInf) return;
    if (x > max) {
      sum = sum * std::exp(max - x) + 1.0;
      max = x;
    } else {
      sum += std::exp(x - max);
    }
  }
  [[nodiscard]] double value() const { return max == kNegInf ? kNegInf : max + std::log(sum); }
};

Lse combine(const Lse& a, const Lse& b) {
  if (a.max == kNegInf) return b;
  if (b.max == kNegInf) return a;
  if (a.max >= b.max) return {a.max, a.sum + b.sum * std::exp(b.max - a.max)};
  return {b.max, b.sum + a.sum * std::exp(a.max - b.max)};
}

Lse pairwise(std::vector<Lse> parts) {
  if (parts.empty()) return {};
  while (parts.size() > 1) {
    std::vector<Lse> next((parts.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = 2 * i + 1 < parts.size() ? combine(parts[2 * i], parts[2 * i + 1]) : parts[2 * i];
    }
    parts = std::move(next);
  }
  return parts[0];
}

void check_width(int bits, int limit, const char* what) {
  if (bits > limit) {
    throw GuardError(std::string("enumeration width ") + std::to_string(bits) + " exceeds the " + what +
                     " limit of " + std::to_string(limit) + " bits");
  }
}

/// Fills a table with log weights produced by make_eval() per chunk, then
/// normalizes it. Chunks are fixed, so the reduction order does not depend on
/// the number of threads.
template <class MakeEval>
void fill_normalized(ExactDistribution& d, int bits, MakeEval make_eval) {
  const std::uint64_t total = std::uint64_t{1} << bits;
  d.probabilities.assign(total, 0.0);
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<Lse> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    auto eval = make_eval();
    Lse acc;
    const std::uint64_t lo = c * kChunk, hi = std::min(total, lo + kChunk);
    for (std::uint64_t code = lo; code < hi; ++code) {
      const double lw = eval(code);
      d.probabilities[code] = lw;
      acc.add(lw);
    }
    parts[c] = acc;
  });
  d.log_z = pairwise(std::move(parts)).value();
  if (!std::isfinite(d.log_z)) throw InvalidParameter("partition function is not finite");
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t lo = c * kChunk, hi = std::min(total, lo + kChunk);
    for (std::uint64_t code = lo; code < hi; ++code) d.probabilities[code] = std::exp(d.probabilities[code] - d.log_z);
  });
}

void check_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("temperature must be positive and finite");
}

void check_field(const LatticeGraph& g, const DisorderField& field) {
  if (field.size() != g.vertex_count()) throw InvalidParameter("field size does not match graph");
  if (!(field.epsilon >= 0.0)) throw InvalidParameter("epsilon must be non-negative");
}

std::string field_tag(const DisorderField& f) {
  return "eps=" + format_double(f.epsilon) + " seed=" + std::to_string(f.seed);
}

/// Log-weight evaluator for the Ising model by spin code.
struct IsingEval {
  const LatticeGraph* g;
  std::vector<double> linear;  // (b_v + eps h_v) / T
  double inv_t;

  double operator()(std::uint64_t code) const {
    double s = 0.0;
    for (const auto& [a, b] : g->edges()) {
      s += (((code >> a) ^ (code >> b)) & 1u) ? -inv_t : inv_t;
    }
    for (std::size_t v = 0; v < linear.size(); ++v) s += ((code >> v) & 1u) ? linear[v] : -linear[v];
    return s;
  }
};

IsingEval make_ising_eval(const LatticeGraph& g, double t, const BoundaryCondition& xi, const DisorderField& field) {
  check_temperature(t);
  check_field(g, field);
  if (xi.kind() != BoundaryCondition::Kind::IsingSpin) throw InvalidParameter("Ising weight needs a spin boundary");
  xi.validate(g);
  const auto b = xi.boundary_field(g);
  IsingEval e{&g, std::vector<double>(g.vertex_count()), 1.0 / t};
  for (std::size_t v = 0; v < e.linear.size(); ++v) e.linear[v] = (b[v] + field.epsilon * field.values[v]) / t;
  return e;
}

/// Log-weight evaluator for the FK model by edge code.
struct FkEval {
  const LatticeGraph* g;
  std::vector<std::vector<int>> groups;
  const DisorderField* field;
  double log_p, log_q, t;
  DisjointSet ds;
  std::vector<double> sums;

  double operator()(std::uint64_t code) {
    const auto edges = g->edges();
    const std::size_t nv = g->vertex_count();
    ds.reset(nv);
    for (const auto& grp : groups) {
      for (std::size_t k = 1; k < grp.size(); ++k) ds.unite(grp[0], grp[k]);
    }
    double lw = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if ((code >> e) & 1u) {
        lw += log_p;
        ds.unite(edges[e].first, edges[e].second);
      } else {
        lw += log_q;
      }
    }
    sums.assign(nv, 0.0);
    std::vector<std::uint8_t>& is_root = roots;
    is_root.assign(nv, 0);
    for (std::size_t v = 0; v < nv; ++v) {
      const auto r = static_cast<std::size_t>(ds.find(static_cast<int>(v)));
      is_root[r] = 1;
      sums[r] += field->values[v];
    }
    for (std::size_t v = 0; v < nv; ++v) {
      if (is_root[v]) lw += std::log(2.0 * std::cosh(field->epsilon * sums[v] / t));
    }
    return lw;
  }

  std::vector<std::uint8_t> roots;
};

}  // namespace

SpinConfig spins_from_code(std::uint64_t code, std::size_t n) {
  SpinConfig s(n);
  for (std::size_t v = 0; v < n; ++v) s[v] = ((code >> v) & 1u) ? 1 : -1;
  return s;
}

EdgeConfig edges_from_code(std::uint64_t code, std::size_t m) {
  EdgeConfig w(m);
  for (std::size_t e = 0; e < m; ++e) w[e] = static_cast<std::uint8_t>((code >> e) & 1u);
  return w;
}

std::uint64_t code_of(const SpinConfig& sigma) {
  if (sigma.size() > 64) throw GuardError("configuration wider than 64 bits");
  std::uint64_t c = 0;
  for (std::size_t v = 0; v < sigma.size(); ++v) {
    if (sigma[v] > 0) c |= std::uint64_t{1} << v;
  }
  return c;
}

std::uint64_t code_of(const EdgeConfig& omega) {
  if (omega.size() > 64) throw GuardError("configuration wider than 64 bits");
  std::uint64_t c = 0;
  for (std::size_t e = 0; e < omega.size(); ++e) {
    if (omega[e]) c |= std::uint64_t{1} << e;
  }
  return c;
}

double ising_log_weight(const SpinConfig& sigma, const LatticeGraph& g, double t, const BoundaryCondition& xi,
                        const DisorderField& field) {
  check_temperature(t);
  check_field(g, field);
  if (sigma.size() != g.vertex_count()) throw InvalidParameter("spin configuration length does not match graph");
  if (xi.kind() != BoundaryCondition::Kind::IsingSpin) throw InvalidParameter("Ising weight needs a spin boundary");
  xi.validate(g);
  const auto b = xi.boundary_field(g);
  double h = 0.0;
  for (const auto& [u, v] : g.edges()) h += sigma[static_cast<std::size_t>(u)] * sigma[static_cast<std::size_t>(v)];
  for (std::size_t v = 0; v < sigma.size(); ++v) h += sigma[v] * (b[v] + field.epsilon * field.values[v]);
  return h / t;
}

double fk_log_weight(const EdgeConfig& omega, const LatticeGraph& g, const Coupling& k, const BoundaryCondition& gamma,
                     const DisorderField& field) {
  check_field(g, field);
  if (omega.size() != g.edge_count()) throw InvalidParameter("edge configuration length does not match graph");
  if (!gamma.is_fk()) throw InvalidParameter("FK weight needs an FK boundary condition");
  gamma.validate(g);
  const double lp = std::log(k.p()), lq = std::log1p(-k.p());
  DisjointSet ds(g.vertex_count());
  for (const auto& grp : gamma.wiring_groups(g)) {
    for (std::size_t i = 1; i < grp.size(); ++i) ds.unite(grp[0], grp[i]);
  }
  double lw = 0.0;
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (omega[e]) {
      lw += lp;
      ds.unite(edges[e].first, edges[e].second);
    } else {
      lw += lq;
    }
  }
  std::vector<double> sums(g.vertex_count(), 0.0);
  std::vector<std::uint8_t> root(g.vertex_count(), 0);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto r = static_cast<std::size_t>(ds.find(static_cast<int>(v)));
    root[r] = 1;
    sums[r] += field.values[v];
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (root[v]) lw += std::log(2.0 * std::cosh(field.epsilon * sums[v] / k.temperature()));
  }
  return lw;
}

double es_joint_log_weight(const SpinConfig& sigma, const EdgeConfig& omega, const LatticeGraph& g, const Coupling& k,
                           const DisorderField& field) {
  check_field(g, field);
  if (sigma.size() != g.vertex_count() || omega.size() != g.edge_count()) {
    throw InvalidParameter("configuration length does not match graph");
  }
  const double lp = std::log(k.p()), lq = std::log1p(-k.p());
  double lw = 0.0;
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (omega[e]) {
      if (sigma[static_cast<std::size_t>(edges[e].first)] != sigma[static_cast<std::size_t>(edges[e].second)]) {
        return kNegInf;
      }
      lw += lp;
    } else {
      lw += lq;
    }
  }
  double s = 0.0;
  for (std::size_t v = 0; v < sigma.size(); ++v) s += field.epsilon * field.values[v] * sigma[v];
  return lw + s / k.temperature();
}

ExactDistribution enumerate_ising(const LatticeGraph& g, double t, const BoundaryCondition& xi,
                                  const DisorderField& field) {
  const int bits = static_cast<int>(g.vertex_count());
  check_width(bits, limits::kMaxSpinBits, "spin");
  const IsingEval eval = make_ising_eval(g, t, xi, field);
  ExactDistribution d;
  d.kind = SupportKind::Spin;
  d.vertex_count = g.vertex_count();
  d.edge_count = g.edge_count();
  d.model_tag = "ising T=" + format_double(t) + " bc=" + xi.name() + " " + field_tag(field);
  fill_normalized(d, bits, [&] { return eval; });
  return d;
}

ExactDistribution enumerate_fk(const LatticeGraph& g, const Coupling& k, const BoundaryCondition& gamma,
                               const DisorderField& field) {
  const int bits = static_cast<int>(g.edge_count());
  check_width(bits, limits::kMaxEdgeBits, "edge");
  check_field(g, field);
  if (!gamma.is_fk()) throw InvalidParameter("FK enumeration needs an FK boundary condition");
  gamma.validate(g);
  const auto groups = gamma.wiring_groups(g);
  ExactDistribution d;
  d.kind = SupportKind::Edge;
  d.vertex_count = g.vertex_count();
  d.edge_count = g.edge_count();
  d.model_tag = "fk p=" + format_double(k.p()) + " bc=" + gamma.name() + " " + field_tag(field);
  const double lp = std::log(k.p()), lq = std::log1p(-k.p());
  fill_normalized(d, bits, [&] {
    return FkEval{&g, groups, &field, lp, lq, k.temperature(), DisjointSet(g.vertex_count()), {}, {}};
  });
  return d;
}

ExactDistribution enumerate_joint(const LatticeGraph& g, const Coupling& k, const DisorderField& field) {
  const int nv = static_cast<int>(g.vertex_count());
  const int bits = nv + static_cast<int>(g.edge_count());
  check_width(bits, limits::kMaxJointBits, "joint");
  check_field(g, field);
  ExactDistribution d;
  d.kind = SupportKind::Joint;
  d.vertex_count = g.vertex_count();
  d.edge_count = g.edge_count();
  d.model_tag = "joint p=" + format_double(k.p()) + " bc=free " + field_tag(field);
  const double lp = std::log(k.p()), lq = std::log1p(-k.p());
  std::vector<double> lin(g.vertex_count());
  for (std::size_t v = 0; v < lin.size(); ++v) lin[v] = field.epsilon * field.values[v] / k.temperature();
  const auto edges = g.edges();
  fill_normalized(d, bits, [&] {
    return [&](std::uint64_t code) {
      const std::uint64_t spins = code & ((std::uint64_t{1} << nv) - 1);
      const std::uint64_t omega = code >> nv;
      double lw = 0.0;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if ((omega >> e) & 1u) {
          if (((spins >> edges[e].first) ^ (spins >> edges[e].second)) & 1u) return kNegInf;
          lw += lp;
        } else {
          lw += lq;
        }
      }
      for (std::size_t v = 0; v < lin.size(); ++v) lw += ((spins >> v) & 1u) ? lin[v] : -lin[v];
      return lw;
    };
  });
  return d;
}

ExactDistribution spin_marginal(const ExactDistribution& joint) {
  if (joint.kind != SupportKind::Joint) throw IncompatibleDistributions("spin marginal needs a joint table");
  ExactDistribution d;
  d.kind = SupportKind::Spin;
  d.vertex_count = joint.vertex_count;
  d.edge_count = joint.edge_count;
  d.log_z = joint.log_z;
  d.model_tag = joint.model_tag + " spin-marginal";
  const std::uint64_t mask = (std::uint64_t{1} << joint.vertex_count) - 1;
  d.probabilities.assign(mask + 1, 0.0);
  for (std::uint64_t c = 0; c < joint.size(); ++c) d.probabilities[c & mask] += joint.probabilities[c];
  return d;
}

ExactDistribution edge_marginal(const ExactDistribution& joint) {
  if (joint.kind != SupportKind::Joint) throw IncompatibleDistributions("edge marginal needs a joint table");
  ExactDistribution d;
  d.kind = SupportKind::Edge;
  d.vertex_count = joint.vertex_count;
  d.edge_count = joint.edge_count;
  d.log_z = joint.log_z;
  d.model_tag = joint.model_tag + " edge-marginal";
  d.probabilities.assign(std::uint64_t{1} << joint.edge_count, 0.0);
  for (std::uint64_t c = 0; c < joint.size(); ++c) d.probabilities[c >> joint.vertex_count] += joint.probabilities[c];
  return d;
}

double exact_tv(const ExactDistribution& a, const ExactDistribution& b) {
  if (a.kind != b.kind || a.size() != b.size() || a.vertex_count != b.vertex_count || a.edge_count != b.edge_count) {
    throw IncompatibleDistributions("total variation needs tables on the same support");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a.probabilities[i] - b.probabilities[i]);
  return std::clamp(0.5 * s, 0.0, 1.0);
}

double partition_ratio_exact(const LatticeGraph& g, const BoundaryCondition& gamma, const DisorderField& field,
                             const Coupling& k) {
  if (field.epsilon == 0.0) return 1.0;
  const auto z0 = enumerate_fk(g, k, gamma, field.with_epsilon(0.0));
  const auto zh = enumerate_fk(g, k, gamma, field);
  return std::exp(z0.log_z - zh.log_z);
}

double ising_field_moment_exact(const LatticeGraph& g, const BoundaryCondition& gamma, const DisorderField& field,
                                double t) {
  check_temperature(t);
  check_field(g, field);
  if (!gamma.is_fk()) throw InvalidParameter("expected an FK boundary condition");
  gamma.validate(g);
  const std::size_t nv = g.vertex_count();
  std::vector<int> var(nv, -1);
  int nvars = 0;
  for (const auto& grp : gamma.wiring_groups(g)) {
    for (int v : grp) var[static_cast<std::size_t>(v)] = nvars;
    ++nvars;
  }
  for (auto& x : var) {
    if (x < 0) x = nvars++;
  }
  check_width(nvars, limits::kMaxSpinBits, "spin");
  const auto edges = g.edges();
  const std::uint64_t total = std::uint64_t{1} << nvars;
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<Lse> base(chunks), tilt(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Lse b, w;
    const std::uint64_t lo = c * kChunk, hi = std::min(total, lo + kChunk);
    for (std::uint64_t code = lo; code < hi; ++code) {
      double lw = 0.0;
      for (const auto& [x, y] : edges) {
        lw += (((code >> var[static_cast<std::size_t>(x)]) ^ (code >> var[static_cast<std::size_t>(y)])) & 1u) ? -1.0 : 1.0;
      }
      lw /= t;
      double lf = 0.0;
      for (std::size_t v = 0; v < nv; ++v) {
        const double x = field.epsilon * field.values[v] / t;
        lf += ((code >> var[v]) & 1u) ? x : -x;
      }
      b.add(lw);
      w.add(lw + lf);
    }
    base[c] = b;
    tilt[c] = w;
  });
  return std::exp(pairwise(std::move(tilt)).value() - pairwise(std::move(base)).value());
}

double product_tv(std::span<const DistributionPair> components) {
  double states = 1.0;
  for (const auto& c : components) {
    if (c.a.size() != c.b.size() || c.a.empty()) throw IncompatibleDistributions("component pair supports differ");
    states *= static_cast<double>(c.a.size());
  }
  if (states > static_cast<double>(std::uint64_t{1} << limits::kMaxSpinBits)) {
    throw GuardError("product support exceeds the enumeration limit of 2^" + std::to_string(limits::kMaxSpinBits));
  }
  const std::size_t n = components.size();
  std::vector<std::size_t> idx(n, 0);
  double s = 0.0;
  for (;;) {
    double pa = 1.0, pb = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      pa *= components[i].a[idx[i]];
      pb *= components[i].b[idx[i]];
    }
    s += std::fabs(pa - pb);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < components[i].a.size()) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  return std::clamp(0.5 * s, 0.0, 1.0);
}

DistributionPair two_point_pair(double tv) {
  if (!(tv >= 0.0 && tv <= 1.0)) throw InvalidParameter("component TV must lie in [0, 1]");
  return {{0.5 + tv / 2.0, 0.5 - tv / 2.0}, {0.5 - tv / 2.0, 0.5 + tv / 2.0}};
}

double check_product_tv_bound(std::span<const double> tvs, int n) {
  if (n < 1) throw InvalidParameter("need at least one component");
  if (tvs.size() != 1 && tvs.size() != static_cast<std::size_t>(n)) {
    throw InvalidParameter("give one TV value or one per component");
  }
  std::vector<DistributionPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pairs.push_back(two_point_pair(tvs.size() == 1 ? tvs[0] : tvs[static_cast<std::size_t>(i)]));
  return product_tv(pairs);
}

}  // namespace rffkim
