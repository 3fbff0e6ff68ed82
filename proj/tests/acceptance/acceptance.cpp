// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Budgets are sized for a single core. RFFKIM_ACCEPTANCE_ONLY=3,5 runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rffkim/clusters.hpp"
#include "rffkim/estimators.hpp"
#include "rffkim/exact.hpp"
#include "rffkim/harness/config.hpp"
#include "rffkim/harness/experiment.hpp"
#include "rffkim/mcmc.hpp"

using namespace rffkim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ModelSpec make_spec(ModelKind m, const LatticeGraph& g, const Coupling& k, BoundaryCondition b, DisorderField f) {
  ModelSpec s;
  s.model = m;
  s.graph = &g;
  s.coupling = k;
  s.boundary = std::move(b);
  s.field = std::move(f);
  return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

// 1. Spin marginal of the joint table is the RFIM law, edge marginal at zero field the FK law.
Outcome es_marginals() {
  const auto k = Coupling::from_temperature(2.0);
  double worst = 0.0;
  for (const auto& g : {LatticeGraph::rectangle(0, 1, 0, 1), LatticeGraph::rectangle(0, 1, 0, 2)}) {
    for (double eps : {0.0, 0.3}) {
      const auto f = sample_field(g, 5, eps);
      const auto joint = enumerate_joint(g, k, f);
      const auto ising = enumerate_ising(g, k.temperature(), BoundaryCondition::ising_uniform(g, 0), f);
      worst = std::max(worst, max_abs_diff(spin_marginal(joint).probabilities, ising.probabilities));
      if (eps == 0.0) {
        const auto fk = enumerate_fk(g, k, BoundaryCondition::fk_free(), f);
        worst = std::max(worst, max_abs_diff(edge_marginal(joint).probabilities, fk.probabilities));
      }
    }
  }
  return {worst <= 1e-12, fmt("max deviation %.3g (tol 1e-12)", worst)};
}

// 2. phi^{eps h}(omega) / phi^0(omega) = Z(h) exp(F(h, omega)) on 2x2.
Outcome rn_identity() {
  const auto g = LatticeGraph::rectangle(0, 1, 0, 1);
  const auto k = Coupling::from_temperature(2.3);
  CounterRng rng(2, streams::kTrials);
  double worst = 0.0;
  for (const auto& gamma : {BoundaryCondition::fk_free(), BoundaryCondition::fk_wired()}) {
    for (int i = 0; i < 10; ++i) {
      const auto f = sample_field(g, rng.next_u64(), 0.2 + 1.8 * rng.uniform());
      const auto with = enumerate_fk(g, k, gamma, f);
      const auto without = enumerate_fk(g, k, gamma, f.with_epsilon(0.0));
      const double z = partition_ratio_exact(g, gamma, f, k);
      for (std::uint64_t c = 0; c < 16; ++c) {
        const double F = f_functional(decompose(edges_from_code(c, 4), g, gamma), f, k.temperature());
        const double lhs = with[c] / without[c];
        const double rhs = z * std::exp(F);
        worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs)));
      }
    }
  }
  return {worst <= 1e-10, fmt("max deviation %.3g over 2 x 10 fields x 16 configs (tol 1e-10)", worst)};
}

// Brute-force <exp(sum eps h sigma / T)> under zero-field Ising with the
// interior boundary tied together (wired) or not (free).
double tied_moment(const LatticeGraph& g, const DisorderField& f, double t, bool wired) {
  const std::size_t n = g.vertex_count();
  double num = 0.0, den = 0.0;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
    auto spin = [&](int v) { return (c >> v) & 1u ? 1.0 : -1.0; };
    if (wired) {
      const auto bd = g.interior_boundary();
      bool tied = true;
      for (int v : bd) tied = tied && spin(v) == spin(bd[0]);
      if (!tied) continue;
    }
    double e = 0.0, d = 0.0;
    for (const auto& [u, v] : g.edges()) e += spin(u) * spin(v);
    for (std::size_t v = 0; v < n; ++v) d += f.scaled(static_cast<int>(v)) * spin(static_cast<int>(v));
    const double w = std::exp(e / t);
    den += w;
    num += w * std::exp(d / t);
  }
  return num / den;
}

// 3. 1/Z(h) as a zero-field spin moment on 3x3.
Outcome partition_expansion() {
  const auto g = LatticeGraph::box(1);
  const auto k = Coupling::from_temperature(2.2);
  CounterRng rng(3, streams::kTrials);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const auto f = sample_field(g, rng.next_u64(), 0.1 + 0.9 * rng.uniform());
    for (bool wired : {false, true}) {
      const auto gamma = wired ? BoundaryCondition::fk_wired() : BoundaryCondition::fk_free();
      const double inv_z = 1.0 / partition_ratio_exact(g, gamma, f, k);
      const double moment = tied_moment(g, f, k.temperature(), wired);
      worst = std::max(worst, std::fabs(inv_z - moment) / moment);
    }
  }
  return {worst <= 1e-10, fmt("max relative deviation %.3g over 5 fields, free and wired (tol 1e-10)", worst)};
}

// 4. ES kernel fixes the joint law; heat-bath is reversible.
Outcome sampler_correctness() {
  const auto g2 = LatticeGraph::rectangle(0, 1, 0, 1);
  double fixed = 0.0;
  for (double eps : {0.0, 0.4, 1.2}) {
    const auto k = Coupling::from_temperature(2.1);
    const auto f = sample_field(g2, 9, eps);
    const auto joint = enumerate_joint(g2, k, f);
    fixed = std::max(fixed, max_abs_diff(es_transition_apply(joint, g2, k, f).probabilities, joint.probabilities));
  }

  const auto g = LatticeGraph::box(1);
  CounterRng rng(4, streams::kTrials);
  double balance = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = 1.0 + 3.0 * rng.uniform();
    const auto xi = BoundaryCondition::ising_uniform(g, static_cast<int>(rng.next_u64() % 3) - 1);
    const auto f = sample_field(g, rng.next_u64(), 2.0 * rng.uniform());
    const auto code = rng.next_u64() % 512;
    const int x = static_cast<int>(rng.next_u64() % 9);
    const auto up = code | (std::uint64_t{1} << x), down = code & ~(std::uint64_t{1} << x);
    const auto sigma = spins_from_code(code, 9);
    double local = xi.boundary_field(g)[static_cast<std::size_t>(x)] + f.scaled(x);
    for (const auto& nb : g.neighbors(x)) local += sigma[static_cast<std::size_t>(nb.vertex)];
    const double p = heatbath_plus_probability(local, t);
    const double lu = ising_log_weight(spins_from_code(up, 9), g, t, xi, f);
    const double ld = ising_log_weight(spins_from_code(down, 9), g, t, xi, f);
    // pi(down) P(down -> up) = pi(up) P(up -> down), normalized by pi(up) + pi(down)
    const double pu = 1.0 / (1.0 + std::exp(ld - lu));
    balance = std::max(balance, std::fabs((1.0 - pu) * p - pu * (1.0 - p)));
  }
  return {fixed <= 1e-10 && balance <= 1e-12,
          fmt("ES fixed point %.3g (tol 1e-10), heat-bath balance %.3g over 100 pairs (tol 1e-12)", fixed, balance)};
}

// 5. RN estimator vs enumeration on 3x3 Ising (T = 2) and 2x2 FK (p = p_c).
Outcome tv_consistency() {
  CounterRng rng(5, streams::kTrials);
  const auto box = LatticeGraph::box(1);
  const auto square = LatticeGraph::rectangle(0, 1, 0, 1);
  int hits = 0;
  std::string misses;
  for (int trial = 0; trial < 20; ++trial) {
    const double eps = 0.1 + 0.9 * rng.uniform();
    const auto seed = rng.next_u64() % 100000;
    const bool ising = trial % 2 == 0;
    const auto& g = ising ? box : square;
    const auto k = ising ? Coupling::from_temperature(2.0) : Coupling::from_p(constants::kCriticalP);
    const auto bc = ising ? BoundaryCondition::ising_uniform(g, 0) : BoundaryCondition::fk_free();
    const auto spec = make_spec(ising ? ModelKind::Rfim : ModelKind::Rffk, g, k, bc, sample_field(g, seed, eps));
    const double exact =
        ising ? exact_tv(enumerate_ising(g, k.temperature(), bc, spec.field),
                         enumerate_ising(g, k.temperature(), bc, spec.field.with_epsilon(0.0)))
              : exact_tv(enumerate_fk(g, k, bc, spec.field), enumerate_fk(g, k, bc, spec.field.with_epsilon(0.0)));
    ChainPlan plan;
    plan.burn_in = 200;
    plan.samples = 600;
    plan.replicas = 32;
    plan.seed_base = 5000 + 64 * static_cast<std::uint64_t>(trial);
    const auto s = collect_ratio_samples(spec, plan);
    const auto z = estimate_partition_ratio(s);
    const auto tv = estimate_tv_rn(s, &z);
    if (std::fabs(tv.value - exact) <= 3.0 * tv.std_error) {
      ++hits;
    } else {
      misses += fmt(" [trial %d eps %.3f exact %.4f est %.4f se %.4f]", trial, eps, exact, tv.value, tv.std_error);
    }
  }
  return {hits >= 18, fmt("%d/20 within 3 SE (need 18)", hits) + misses};
}

// 6. Exact TV on 3x3 RFIM, disorder median over 32 seeds.
Outcome exact_tv_direction() {
  const auto g = LatticeGraph::box(1);
  const double t = 2.0;
  const auto xi = BoundaryCondition::ising_uniform(g, 0);
  auto median_tv = [&](double eps) {
    std::vector<double> tv;
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
      const auto f = sample_field(g, seed, eps);
      tv.push_back(exact_tv(enumerate_ising(g, t, xi, f), enumerate_ising(g, t, xi, f.with_epsilon(0.0))));
    }
    return median(tv);
  };
  const double weak = median_tv(0.01), strong = median_tv(3.0);
  return {weak < 0.1 && strong > 0.9,
          fmt("median TV at eps=0.01: %.4f (need < 0.1); at eps=3: %.4f (need > 0.9)", weak, strong)};
}

// 7. At T_c, TV along N^{-1/2} grows with N and beats TV along N^{-5/4}.
Outcome critical_trend() {
  harness::ExperimentConfig c;
  c.name = "acceptance trend";
  c.model = ModelKind::Rffk;
  c.regime = "crit";
  c.boundary = "free";
  c.n_list = {8, 16, 32};
  c.alphas = {0.5, 1.25};
  c.burn_in = 1000;
  c.thin = 5;
  c.samples = 200;
  c.replicas = 4;
  c.seed = 7;
  c.disorder_seeds = 16;
  c.disorder_seed_base = 7000;
  c.validate();
  const auto rows = harness::run_sweep(c);
  auto row = [&](int n, double a) -> const harness::SweepRow& {
    for (const auto& r : rows) {
      if (r.n == n && r.alpha == a) return r;
    }
    throw std::runtime_error("missing sweep row");
  };
  bool monotone = true, above = true;
  std::string table;
  for (int n : c.n_list) {
    const auto& h = row(n, 0.5);
    const auto& l = row(n, 1.25);
    table += fmt(" N=%d: %.4f+-%.4f vs %.4f+-%.4f;", n, h.tv_mean, h.tv_se, l.tv_mean, l.tv_se);
    above = above && h.tv_mean > l.tv_mean;
  }
  for (std::size_t i = 0; i + 1 < c.n_list.size(); ++i) {
    const auto& a = row(c.n_list[i], 0.5);
    const auto& b = row(c.n_list[i + 1], 0.5);
    monotone = monotone && b.tv_mean >= a.tv_mean - 2.0 * std::hypot(a.tv_se, b.tv_se);
  }
  const auto& h = row(32, 0.5);
  const auto& l = row(32, 1.25);
  const double gap = (h.tv_mean - l.tv_mean) / std::hypot(h.tv_se, l.tv_se);
  return {monotone && above && gap >= 2.0,
          fmt("nondecreasing %s, above at every N %s, separation at N=32 %.2f SE (need 2);", monotone ? "yes" : "no",
              above ? "yes" : "no", gap) +
              table};
}

// 8. Critical wired max-cluster scaling and monotone tails.
Outcome critical_scaling() {
  TailPlan plan;
  plan.boundary = BoundaryCondition::fk_wired();
  plan.chain.burn_in = 2000;
  plan.chain.thin = 10;
  plan.chain.samples = 200;
  plan.chain.replicas = 1;
  plan.chain.seed_base = 8;
  const std::vector<int> ns{16, 32, 64};
  const auto rows = ldp_tail(constants::kCriticalP, ns, plan);
  double lo = INFINITY, hi = 0.0;
  bool tails = true;
  std::string detail;
  const std::vector<double> multipliers{1.0, 1.05, 1.1, 1.25, 1.5};
  for (const auto& r : rows) {
    lo = std::min(lo, r.median_max_scaled);
    hi = std::max(hi, r.median_max_scaled);
    const double norm = std::pow(r.n, 15.0 / 8.0) * r.median_max_scaled;
    std::vector<double> freq;
    for (double x : multipliers) freq.push_back(tail_frequency(r.max_sizes, x * norm));
    for (std::size_t i = 0; i + 1 < freq.size(); ++i) tails = tails && freq[i + 1] <= freq[i];
    tails = tails && freq.back() < freq.front();
    detail += fmt(" N=%d median %.3f tails", r.n, r.median_max_scaled);
    for (double q : freq) detail += fmt(" %.3f", q);
    detail += ";";
  }
  return {hi <= 2.0 * lo && tails,
          fmt("median spread x%.3f (need <= 2), tails decreasing %s;", hi / lo, tails ? "yes" : "no") + detail};
}

// 9. Subcritical max cluster tail and supercritical boundary dominance.
Outcome off_critical() {
  TailPlan sub;
  sub.boundary = BoundaryCondition::fk_free();
  sub.chain.burn_in = 200;
  sub.chain.thin = 10;
  sub.chain.samples = 200;
  sub.chain.replicas = 1;
  sub.chain.seed_base = 9;
  const std::vector<int> n32{32};
  const auto low = ldp_tail(0.3, n32, sub).front();
  const double freq = tail_frequency(low.max_sizes, std::pow(32.0, 0.9));

  TailPlan super = sub;
  super.boundary = BoundaryCondition::fk_wired();
  const auto high = ldp_tail(0.9, n32, super).front();
  return {freq < 0.01 && high.boundary_is_maximal >= 0.95,
          fmt("p=0.3 P(max|C| >= N^0.9) = %.3f (need < 0.01); p=0.9 boundary cluster maximal in %.3f (need >= 0.95)",
              freq, high.boundary_is_maximal)};
}

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    if (const char* old = std::getenv("RFFKIM_THREADS")) saved_ = old;
    ::setenv("RFFKIM_THREADS", value, 1);
  }
  ~ThreadsEnv() {
    if (saved_.empty()) {
      ::unsetenv("RFFKIM_THREADS");
    } else {
      ::setenv("RFFKIM_THREADS", saved_.c_str(), 1);
    }
  }

 private:
  std::string saved_;
};

// 10. Same config, different thread counts, identical bytes.
Outcome determinism() {
  bool same = true;
  std::size_t bytes = 0;
  for (auto model : {ModelKind::Rffk, ModelKind::Rfim}) {
    harness::ExperimentConfig c;
    c.model = model;
    c.regime = "crit";
    c.n_list = {4, 8};
    c.alphas = {0.5, 0.9375};
    c.burn_in = 100;
    c.samples = 200;
    c.replicas = 2;
    c.disorder_seeds = 4;
    std::string runs[3];
    const char* threads[3] = {"1", "2", "5"};
    for (int i = 0; i < 3; ++i) {
      ThreadsEnv env(threads[i]);
      runs[i] = harness::sweep_csv(harness::run_sweep(c));
    }
    same = same && runs[0] == runs[1] && runs[0] == runs[2];
    bytes += runs[0].size();
  }
  return {same, fmt("rffk and rfim sweeps at 1, 2 and 5 threads: %s (%zu bytes)", same ? "identical" : "DIFFER",
                    bytes)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"ES marginal equivalence", es_marginals},
      {"Radon-Nikodym identity", rn_identity},
      {"partition expansion", partition_expansion},
      {"sampler correctness", sampler_correctness},
      {"TV estimator consistency", tv_consistency},
      {"exact TV direction", exact_tv_direction},
      {"critical trend", critical_trend},
      {"critical max-cluster scaling", critical_scaling},
      {"off-critical cluster laws", off_critical},
      {"determinism", determinism},
  };
  std::set<int> only;
  if (const char* env = std::getenv("RFFKIM_ACCEPTANCE_ONLY")) {
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) only.insert(std::stoi(item));
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
