#include "rffkim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rffkim/errors.hpp"
#include "rffkim/parallel.hpp"

namespace rffkim {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
  const double hi = x[mid];
  if (x.size() % 2 == 1) return hi;
  const double lo = *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double integrated_autocorrelation_time(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.5;
  const double m = mean(x);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  c0 /= static_cast<double>(n);
  if (c0 == 0.0) return 0.5;
  double tau = 0.5;
  for (std::size_t w = 1; w < n; ++w) {
    double c = 0.0;
    for (std::size_t i = 0; i + w < n; ++i) c += (x[i] - m) * (x[i + w] - m);
    c /= static_cast<double>(n) * c0;
    tau += c;
    if (static_cast<double>(w) >= 6.0 * tau) break;
  }
  return std::max(tau, 0.5);
}

double batch_means_error(std::span<const double> x, int batches) {
  const std::size_t n = x.size();
  if (batches < 2 || n < static_cast<std::size_t>(batches)) return n < 2 ? 0.0 : std::sqrt(variance(x) / static_cast<double>(n));
  const std::size_t len = n / static_cast<std::size_t>(batches);
  std::vector<double> bm(static_cast<std::size_t>(batches));
  for (std::size_t b = 0; b < bm.size(); ++b) bm[b] = mean(x.subspan(b * len, len));
  return std::sqrt(variance(bm) / static_cast<double>(batches));
}

// ---- Radon-Nikodym samples ----

ReferenceSamples ReferenceSamples::collect(const ModelSpec& spec, const ChainPlan& plan) {
  ModelSpec zero = spec;
  zero.field = spec.field.with_epsilon(0.0);
  ChainPlan p = plan;
  p.keep_configurations = true;
  auto samples = run_chain(p, zero);

  ReferenceSamples r;
  r.model_ = spec.model;
  r.t_ = spec.coupling.temperature();
  r.replicas_ = plan.replicas;
  r.vertices_ = spec.graph->vertex_count();
  r.replica_.reserve(samples.size());
  for (auto& s : samples) {
    r.replica_.push_back(s.replica);
    if (spec.model == ModelKind::Rffk) {
      ChainState st;
      st.sigma = s.sigma;
      st.omega = s.omega;
      st.ghost_bond.assign(r.vertices_, 0);
      const auto d = state_clusters(st, zero);
      r.cluster_count_.push_back(static_cast<int>(d.kappa()));
      r.labels_.insert(r.labels_.end(), d.label.begin(), d.label.end());
    } else {
      r.spins_.insert(r.spins_.end(), s.sigma.begin(), s.sigma.end());
    }
    s.sigma.clear();
    s.sigma.shrink_to_fit();
    s.omega.clear();
    s.omega.shrink_to_fit();
  }
  r.samples_ = std::move(samples);
  return r;
}

std::vector<std::vector<double>> ReferenceSamples::statistic(const DisorderField& field) const {
  if (field.size() != vertices_) throw InvalidParameter("field size does not match reference samples");
  std::vector<std::vector<double>> out(static_cast<std::size_t>(replicas_));
  std::vector<double> sums;
  const double scale = field.epsilon / t_;
  for (std::size_t i = 0; i < replica_.size(); ++i) {
    double l = 0.0;
    if (model_ == ModelKind::Rffk) {
      sums.assign(static_cast<std::size_t>(cluster_count_[i]), 0.0);
      const std::int32_t* lab = labels_.data() + i * vertices_;
      for (std::size_t v = 0; v < vertices_; ++v) sums[static_cast<std::size_t>(lab[v])] += field.values[v];
      if (scale != 0.0) {
        for (double h : sums) l += log_cosh(scale * h);
      }
    } else {
      const std::int8_t* sp = spins_.data() + i * vertices_;
      for (std::size_t v = 0; v < vertices_; ++v) l += field.values[v] * sp[v];
      l *= scale;
    }
    out[static_cast<std::size_t>(replica_[i])].push_back(l);
  }
  return out;
}

std::vector<std::vector<double>> tilted_statistics(const ModelSpec& spec, const ChainPlan& plan) {
  const auto samples = run_chain(plan, spec);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(plan.replicas));
  for (const auto& s : samples) {
    out[static_cast<std::size_t>(s.replica)].push_back(spec.model == ModelKind::Rffk ? s.stats.f_value : s.field_dot);
  }
  return out;
}

RatioSamples collect_ratio_samples(const ModelSpec& spec, const ChainPlan& plan) {
  RatioSamples r;
  r.reference = ReferenceSamples::collect(spec, plan).statistic(spec.field);
  ChainPlan tilted = plan;
  tilted.stream = plan.stream + 1;
  r.tilted = tilted_statistics(spec, tilted);
  return r;
}

namespace {

constexpr int kMinBlocks = 10;

/// Blocks used for the jackknife: the replicas themselves, or contiguous
/// pieces of a single long chain.
std::vector<std::vector<double>> reblock(const std::vector<std::vector<double>>& in) {
  std::vector<std::vector<double>> blocks;
  for (const auto& b : in) {
    if (!b.empty()) blocks.push_back(b);
  }
  if (blocks.size() >= 2 || blocks.empty()) return blocks;
  const auto& all = blocks[0];
  const std::size_t k = std::min<std::size_t>(kMinBlocks, all.size());
  std::vector<std::vector<double>> out(k);
  const std::size_t len = all.size() / k;
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t lo = b * len, hi = b + 1 == k ? all.size() : lo + len;
    out[b].assign(all.begin() + static_cast<std::ptrdiff_t>(lo), all.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  return out;
}

/// log of the mean of exp(c * x) over all blocks except `skip`.
double log_mean_exp(const std::vector<std::vector<double>>& blocks, double c, std::size_t skip) {
  double mx = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b == skip) continue;
    for (double v : blocks[b]) mx = std::max(mx, c * v);
    n += blocks[b].size();
  }
  if (n == 0) throw PreconditionError("no samples for the partition-ratio estimate");
  double s = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b == skip) continue;
    for (double v : blocks[b]) s += std::exp(c * v - mx);
  }
  return mx + std::log(s / static_cast<double>(n));
}

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Blocked {
  std::vector<std::vector<double>> ref;
  std::vector<std::vector<double>> tilt;
  std::size_t count = 0;

  explicit Blocked(const RatioSamples& s) : ref(reblock(s.reference)), tilt(reblock(s.tilted)) {
    if (ref.empty() || tilt.empty()) throw PreconditionError("ratio samples are empty");
    count = std::min(ref.size(), tilt.size());
    if (ref.size() != tilt.size()) {
      // fold extra blocks into the last shared block
      for (std::size_t b = count; b < ref.size(); ++b) ref[count - 1].insert(ref[count - 1].end(), ref[b].begin(), ref[b].end());
      for (std::size_t b = count; b < tilt.size(); ++b) tilt[count - 1].insert(tilt[count - 1].end(), tilt[b].begin(), tilt[b].end());
      ref.resize(count);
      tilt.resize(count);
    }
  }

  [[nodiscard]] double log_bridge(std::size_t skip) const {
    return log_mean_exp(tilt, -0.5, skip) - log_mean_exp(ref, 0.5, skip);
  }
};

EstimateWithError jackknife_log(std::size_t blocks, const std::function<double(std::size_t)>& log_stat,
                                const char* method) {
  auto e = jackknife(blocks, [&](std::size_t b) { return std::exp(log_stat(b)); }, std::exp(log_stat(kNone)));
  e.method = method;
  return e;
}

}  // namespace

PartitionRatioEstimate estimate_partition_ratio(const RatioSamples& s) {
  const Blocked bl(s);
  PartitionRatioEstimate out;
  out.bridge = jackknife_log(bl.count, [&](std::size_t b) { return bl.log_bridge(b); }, "bridge");
  out.forward = jackknife_log(bl.count, [&](std::size_t b) { return -log_mean_exp(bl.ref, 1.0, b); }, "forward");
  out.reverse = jackknife_log(bl.count, [&](std::size_t b) { return log_mean_exp(bl.tilt, -1.0, b); }, "reverse");
  out.overlap = std::exp(0.5 * (log_mean_exp(bl.ref, 0.5, kNone) + log_mean_exp(bl.tilt, -0.5, kNone)));
  out.unreliable = out.overlap < limits::kMinBridgeOverlap;
  out.bridge.unreliable = out.unreliable;
  out.bridge.diagnostics["overlap"] = out.overlap;
  std::size_t n0 = 0, n1 = 0;
  for (const auto& b : bl.ref) n0 += b.size();
  for (const auto& b : bl.tilt) n1 += b.size();
  out.bridge.diagnostics["reference_samples"] = static_cast<double>(n0);
  out.bridge.diagnostics["tilted_samples"] = static_cast<double>(n1);
  return out;
}

EstimateWithError estimate_tv_rn(const RatioSamples& s, const PartitionRatioEstimate* z) {
  if (z == nullptr) throw PreconditionError("TV estimate needs a partition-ratio estimate");
  const Blocked bl(s);
  auto tv_without = [&](std::size_t skip) {
    const double log_z = skip == kNone ? std::log(z->bridge.value) : bl.log_bridge(skip);
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t b = 0; b < bl.count; ++b) {
      if (b == skip) continue;
      for (double l : bl.ref[b]) acc += std::max(0.0, -std::expm1(log_z + l));
      n += bl.ref[b].size();
    }
    return acc / static_cast<double>(n);
  };
  const double full = tv_without(kNone);
  auto e = jackknife(bl.count, tv_without, full);
  e.method = "radon-nikodym";
  e.value = std::clamp(e.value, 0.0, 1.0);
  double sens = 0.0;
  std::size_t n = 0;
  for (const auto& b : bl.ref) {
    for (double l : b) {
      const double g = z->bridge.value * std::exp(l);
      if (g < 1.0) sens -= std::exp(l);
      ++n;
    }
  }
  sens /= static_cast<double>(n);
  e.diagnostics["dtv_dz"] = sens;
  e.diagnostics["plugin_bias_scale"] = std::fabs(sens) * z->bridge.std_error;
  e.diagnostics["overlap"] = z->overlap;
  e.diagnostics["clamped"] = (full < 0.0 || full > 1.0) ? 1.0 : 0.0;
  e.unreliable = z->unreliable;
  return e;
}

// ---- concentration statistics ----

PStatistics p_statistics(const DisorderField& field, std::span<const double> f_values, double t, int n,
                         double alpha) {
  if (!(t > 0.0)) throw InvalidParameter("temperature must be positive");
  PStatistics p;
  const double eps = field.epsilon;
  const double nn = static_cast<double>(n);
  p.centering = 2.0 * eps * eps * nn * nn / (t * t);
  double s = 0.0;
  if (eps != 0.0) {
    for (double h : field.values) s += log_cosh(eps * h / t);
  }
  p.p1_margin = s - p.centering;
  p.p1_threshold = std::sqrt(eps * eps * nn);
  p.p1_holds = std::fabs(p.p1_margin) <= p.p1_threshold;
  p.p23_threshold = eps * std::pow(nn, alpha);
  p.margins.reserve(f_values.size());
  std::size_t up = 0, down = 0;
  for (double f : f_values) {
    const double m = f - p.centering;
    p.margins.push_back(m);
    if (m > p.p23_threshold) ++up;
    if (m < -p.p23_threshold) ++down;
  }
  if (!f_values.empty()) {
    p.p2_exceed = static_cast<double>(up) / static_cast<double>(f_values.size());
    p.p3_exceed = static_cast<double>(down) / static_cast<double>(f_values.size());
  }
  return p;
}

// ---- boundary influence ----

namespace {

struct InfluenceSample {
  double value = 0.0;
  double se = 0.0;
};

InfluenceSample origin_difference(double t, const LatticeGraph& g, const DisorderField& field, const InfluencePlan& plan,
                                  std::uint64_t seed_base) {
  double means[2] = {0.0, 0.0};
  double vars[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    ModelSpec spec;
    spec.model = plan.sampler;
    spec.graph = &g;
    spec.coupling = Coupling::from_temperature(t);
    spec.boundary = BoundaryCondition::ising_uniform(g, k == 0 ? 1 : -1);
    spec.field = field;
    ChainPlan cp = plan.chain;
    cp.seed_base = seed_base;
    cp.stream = plan.chain.stream + static_cast<std::uint64_t>(2 * k);
    const auto samples = run_chain(cp, spec);
    std::vector<std::vector<double>> per(static_cast<std::size_t>(cp.replicas));
    std::vector<double> all;
    for (const auto& s : samples) {
      per[static_cast<std::size_t>(s.replica)].push_back(s.origin_spin);
      all.push_back(s.origin_spin);
    }
    means[k] = mean(all);
    if (cp.replicas >= 2) {
      std::vector<double> rm;
      for (const auto& v : per) rm.push_back(mean(v));
      vars[k] = variance(rm) / static_cast<double>(rm.size());
    } else {
      const double se = batch_means_error(all);
      vars[k] = se * se;
    }
  }
  return {0.5 * (means[0] - means[1]), 0.5 * std::sqrt(vars[0] + vars[1])};
}

}  // namespace

EstimateWithError boundary_influence(double t, int n, double epsilon, const InfluencePlan& plan) {
  if (plan.disorder_seeds.empty()) throw InvalidParameter("boundary influence needs at least one disorder seed");
  const auto g = LatticeGraph::box(n);
  const std::size_t d = plan.disorder_seeds.size();
  std::vector<InfluenceSample> per(d);
  for (std::size_t k = 0; k < d; ++k) {
    const auto field = sample_field(g, plan.disorder_seeds[k], epsilon);
    per[k] = origin_difference(t, g, field, plan,
                               plan.chain.seed_base + static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(plan.chain.replicas));
  }
  std::vector<double> vals;
  double within = 0.0;
  for (const auto& s : per) {
    vals.push_back(s.value);
    within += s.se * s.se;
  }
  EstimateWithError e;
  e.value = mean(vals);
  e.std_error = d >= 2 ? std::sqrt(variance(vals) / static_cast<double>(d)) : std::sqrt(within);
  e.replicas = plan.chain.replicas;
  e.method = "boundary-influence";
  e.diagnostics["disorder_samples"] = static_cast<double>(d);
  e.diagnostics["thermal_se"] = std::sqrt(within) / static_cast<double>(d);
  return e;
}

double boundary_influence_exact(double t, int n, const DisorderField& field) {
  const auto g = LatticeGraph::box(n);
  const auto o = static_cast<std::size_t>(*g.index_of(g.origin()));
  double m[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    const auto d = enumerate_ising(g, t, BoundaryCondition::ising_uniform(g, k == 0 ? 1 : -1), field);
    for (std::uint64_t c = 0; c < d.size(); ++c) m[k] += ((c >> o) & 1u) ? d[c] : -d[c];
  }
  return 0.5 * (m[0] - m[1]);
}

CorrelationLength correlation_length(double t, double epsilon, std::span<const int> grid, const InfluencePlan& plan) {
  CorrelationLength out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1])) {
      throw InvalidParameter("correlation-length grid must be increasing and positive");
    }
  }
  for (int n : grid) {
    const auto mf = boundary_influence(t, n, epsilon, plan);
    const auto m0 = epsilon == 0.0 ? mf : boundary_influence(t, n, 0.0, plan);
    out.m_field.push_back(mf);
    out.m_zero.push_back(m0);
    if (epsilon > 0.0 && mf.value + 2.0 * mf.std_error < 0.5 * (m0.value - 2.0 * m0.std_error)) {
      out.value = n;
      break;
    }
  }
  return out;
}

// ---- tails ----

double tail_frequency(std::span<const double> values, double threshold) {
  if (values.empty()) return 0.0;
  const auto k = std::count_if(values.begin(), values.end(), [&](double v) { return v >= threshold; });
  return static_cast<double>(k) / static_cast<double>(values.size());
}

std::vector<TailRow> ldp_tail(double p, std::span<const int> n_list, const TailPlan& plan) {
  std::vector<TailRow> rows;
  for (int n : n_list) {
    const auto g = LatticeGraph::box(n);
    ModelSpec spec;
    spec.model = ModelKind::Rffk;
    spec.graph = &g;
    spec.coupling = Coupling::from_p(p);
    spec.boundary = plan.boundary;
    spec.field = sample_field(g, 0, 0.0);
    const auto samples = run_chain(plan.chain, spec);
    TailRow row;
    row.n = n;
    row.samples = samples.size();
    const double nn = static_cast<double>(n);
    std::vector<double> mx, mm, m2;
    std::size_t bmax = 0;
    for (const auto& s : samples) {
      row.max_sizes.push_back(static_cast<double>(s.stats.max_size));
      row.sum_sq.push_back(static_cast<double>(s.stats.sum_sq));
      row.second_sizes.push_back(static_cast<double>(s.stats.second_size));
      mx.push_back(static_cast<double>(s.stats.max_size) / std::pow(nn, 15.0 / 8.0));
      mm.push_back(static_cast<double>(s.stats.sum_sq) / std::pow(nn, 15.0 / 4.0));
      m2.push_back(static_cast<double>(s.stats.sum_sq) / (nn * nn));
      if (s.stats.boundary_is_maximal) ++bmax;
    }
    row.median_max_scaled = median(mx);
    row.median_sumsq_scaled = median(mm);
    row.median_sumsq_over_n2 = median(m2);
    row.boundary_is_maximal = samples.empty() ? 0.0 : static_cast<double>(bmax) / static_cast<double>(samples.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rffkim
