// Command-line front end: exact enumeration, sampling, sweeps and plots.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "rffkim/clusters.hpp"
#include "rffkim/errors.hpp"
#include "rffkim/estimators.hpp"
#include "rffkim/exact.hpp"
#include "rffkim/format.hpp"
#include "rffkim/harness/config.hpp"
#include "rffkim/harness/experiment.hpp"
#include "rffkim/harness/plot.hpp"
#include "rffkim/harness/store.hpp"

using namespace rffkim;
using nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;

/// Non-finite values become null.
ordered_json num(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json stats_json(const ClusterStats& s) {
  return ordered_json{{"kappa", s.kappa},
                      {"max_cluster", s.max_size},
                      {"second_cluster", s.second_size},
                      {"sum_sq", s.sum_sq},
                      {"sum_quartic", s.sum_quartic},
                      {"boundary_cluster", s.boundary_size},
                      {"boundary_is_maximal", s.boundary_is_maximal},
                      {"F_value", num(s.f_value)}};
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  return file;
}

// ---- exact-tv ----

struct ExactTvArgs {
  std::string model = "fk";
  int n = 1;
  double temp = constants::kCriticalT;
  double epsilon = 0.5;
  std::uint64_t seed = 0;
  std::string boundary;
};

void run_exact_tv(const ExactTvArgs& a) {
  const auto g = LatticeGraph::box(a.n);
  const auto model = parse_model(a.model);
  const auto k = Coupling::from_temperature(a.temp);
  const auto field = sample_field(g, a.seed, a.epsilon);
  const std::string bname = a.boundary.empty() ? (model == ModelKind::Rffk ? "free" : "zero") : a.boundary;
  auto b = parse_boundary(bname, g);
  ExactDistribution with, without;
  if (model == ModelKind::Rfim) {
    if (b.is_fk()) {
      if (b.kind() != BoundaryCondition::Kind::FkFree) throw ConfigError("the ising model needs plus, minus or zero");
      b = BoundaryCondition::ising_uniform(g, 0);
    }
    with = enumerate_ising(g, a.temp, b, field);
    without = enumerate_ising(g, a.temp, b, field.with_epsilon(0.0));
  } else {
    if (!b.is_fk()) throw ConfigError("the fk model needs a free or wired boundary");
    with = enumerate_fk(g, k, b, field);
    without = enumerate_fk(g, k, b, field.with_epsilon(0.0));
  }
  ordered_json out{{"tv", num(exact_tv(with, without))},
                   {"z_ratio", num(std::exp(without.log_z - with.log_z))},
                   {"log_z0", num(without.log_z)},
                   {"log_zh", num(with.log_z)}};
  std::cout << out.dump() << '\n';
}

// ---- sample ----

struct SampleArgs {
  std::string model = "rffk";
  int n = 8;
  double temp = constants::kCriticalT;
  double epsilon = 0.0;
  std::string boundary;
  std::int64_t sweeps = 1000;
  std::int64_t burn_in = -1;
  std::int64_t thin = 1;
  int replicas = 1;
  std::uint64_t seed = 0;
  std::uint64_t disorder_seed = 0;
  bool disorder_seed_set = false;
  std::string out;
};

void run_sample(const SampleArgs& a) {
  const auto g = LatticeGraph::box(a.n);
  ModelSpec spec;
  spec.model = parse_model(a.model);
  spec.graph = &g;
  spec.coupling = Coupling::from_temperature(a.temp);
  spec.boundary = parse_boundary(a.boundary.empty() ? (spec.model == ModelKind::Rffk ? "free" : "zero") : a.boundary, g);
  spec.field = sample_field(g, a.disorder_seed_set ? a.disorder_seed : a.seed, a.epsilon);
  ChainPlan plan;
  plan.burn_in = a.burn_in;
  plan.thin = a.thin;
  if (a.sweeps < 0 || a.thin < 1) throw ConfigError("--sweeps must be non-negative and --thin positive");
  plan.samples = a.sweeps / a.thin;
  plan.replicas = a.replicas;
  plan.seed_base = a.seed;
  const auto samples = run_chain(plan, spec);
  std::ofstream file;
  auto& out = open_out(a.out, file);
  out << "replica,sweep,kappa,max_cluster,sum_sq,sum_quartic,boundary_cluster,F_value,magnetization\n";
  for (const auto& s : samples) {
    out << s.replica << ',' << s.sweep << ',' << s.stats.kappa << ',' << s.stats.max_size << ',' << s.stats.sum_sq << ','
        << s.stats.sum_quartic << ',' << s.stats.boundary_size << ',' << format_double(s.stats.f_value) << ','
        << format_double(s.magnetization) << '\n';
  }
}

// ---- stats ----

struct StatsArgs {
  std::string in;
  std::string boundary = "free";
  int n = 0;
  double temp = constants::kCriticalT;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

/// Edge configuration file: '0'/'1' characters in edge-index order, anything
/// else (whitespace, newlines) ignored.
EdgeConfig read_bits(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  EdgeConfig w;
  char c;
  while (in.get(c)) {
    if (c == '0' || c == '1') {
      w.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw SchemaError(std::string("unexpected character '") + c + "' in edge configuration");
    }
  }
  return w;
}

void run_stats(const StatsArgs& a) {
  const auto w = read_bits(a.in);
  int n = a.n;
  if (n == 0) {
    // Lambda_n has 4 n (2 n + 1) edges
    for (int k = 1; k < 4096 && n == 0; ++k) {
      if (4ull * static_cast<unsigned long long>(k) * (2ull * static_cast<unsigned long long>(k) + 1) == w.size()) n = k;
    }
    if (n == 0) throw SchemaError("edge count " + std::to_string(w.size()) + " matches no box; pass --n");
  }
  const auto g = LatticeGraph::box(n);
  if (w.size() != g.edge_count()) {
    throw SchemaError("expected " + std::to_string(g.edge_count()) + " edges, file has " + std::to_string(w.size()));
  }
  const auto b = parse_boundary(a.boundary, g);
  if (!b.is_fk()) throw ConfigError("stats needs an FK boundary (free or wired)");
  const auto field = sample_field(g, a.seed, a.epsilon);
  const auto d = decompose(w, g, b);
  auto out = stats_json(cluster_stats(d, &field, a.temp));
  out = ordered_json{{"n", n}, {"boundary", a.boundary}, {"stats", out}};
  std::cout << out.dump() << '\n';
}

// ---- sweep ----

struct SweepArgs {
  harness::ExperimentConfig config;
  std::string model = "rffk";
  std::string regime = "crit";
  std::optional<double> temp;
  std::string alpha = "auto";
  std::string n_list = "8,16,32,64";
  std::string out = "sweep.csv";
  std::string plot;
};

void run_sweep_cmd(SweepArgs a) {
  auto& c = a.config;
  c.model = parse_model(a.model);
  c.regime = a.regime;
  c.temperature = a.temp;
  c.alphas = a.alpha == "auto" ? std::vector<double>{} : harness::parse_double_list(a.alpha);
  c.n_list = harness::parse_int_list(a.n_list);
  const auto rows = harness::run_sweep(c, [](const std::string& msg) { std::cerr << msg << '\n'; });
  std::ofstream file;
  auto& out = open_out(a.out, file);
  harness::write_sweep_csv(out, rows);
  if (!a.plot.empty()) {
    if (a.out.empty() || a.out == "-") throw ConfigError("--plot needs --out to name a CSV file");
    file.close();
    harness::emit_plot(a.out, a.plot, c.name);
  }
}

// ---- ldp-tail ----

struct TailArgs {
  double p = constants::kCriticalP;
  std::string n_list = "16,32,64";
  std::string boundary = "wired";
  std::int64_t samples = 200;
  std::int64_t burn_in = -1;
  std::int64_t thin = 1;
  int replicas = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_tail(const TailArgs& a) {
  TailPlan plan;
  plan.chain.samples = a.samples;
  plan.chain.burn_in = a.burn_in;
  plan.chain.thin = a.thin;
  plan.chain.replicas = a.replicas;
  plan.chain.seed_base = a.seed;
  const auto probe = LatticeGraph::box(1);
  plan.boundary = parse_boundary(a.boundary, probe);
  if (!plan.boundary.is_fk()) throw ConfigError("ldp-tail needs an FK boundary (free or wired)");
  const auto ns = harness::parse_int_list(a.n_list);
  const auto rows = ldp_tail(a.p, ns, plan);
  ordered_json out = ordered_json::array();
  for (const auto& r : rows) {
    out.push_back({{"N", r.n},
                   {"samples", r.samples},
                   {"median_max_over_N^15/8", num(r.median_max_scaled)},
                   {"median_sumsq_over_N^15/4", num(r.median_sumsq_scaled)},
                   {"median_sumsq_over_N^2", num(r.median_sumsq_over_n2)},
                   {"median_second_cluster", num(median(r.second_sizes))},
                   {"boundary_is_maximal", num(r.boundary_is_maximal)}});
  }
  std::cout << out.dump(2) << '\n';
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + a.out + "'");
    f << "N,sample,max_cluster,second_cluster,sum_sq\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.max_sizes.size(); ++i) {
        f << r.n << ',' << i << ',' << format_double(r.max_sizes[i]) << ',' << format_double(r.second_sizes[i]) << ','
          << format_double(r.sum_sq[i]) << '\n';
      }
    }
  }
}

// ---- boundary influence / correlation length ----

struct InfluenceArgs {
  double temp = 2.0;
  int n = 4;
  double epsilon = 0.0;
  std::string grid = "2,4,8";
  int disorder_seeds = 8;
  std::uint64_t disorder_seed_base = 0;
  std::int64_t samples = 1000;
  std::int64_t burn_in = -1;
  int replicas = 4;
  std::uint64_t seed = 0;
  std::string sampler = "rffk";
};

InfluencePlan influence_plan(const InfluenceArgs& a) {
  InfluencePlan p;
  p.chain.samples = a.samples;
  p.chain.burn_in = a.burn_in;
  p.chain.replicas = a.replicas;
  p.chain.seed_base = a.seed;
  p.sampler = parse_model(a.sampler);
  if (a.disorder_seeds < 1) throw ConfigError("--disorder-seeds must be positive");
  for (int d = 0; d < a.disorder_seeds; ++d) p.disorder_seeds.push_back(a.disorder_seed_base + static_cast<std::uint64_t>(d));
  return p;
}

ordered_json estimate_json(const EstimateWithError& e) {
  ordered_json j{{"value", num(e.value)}, {"std_error", num(e.std_error)}};
  for (const auto& [k, v] : e.diagnostics) j[k] = num(v);
  return j;
}

void run_influence(const InfluenceArgs& a) {
  const auto m = boundary_influence(a.temp, a.n, a.epsilon, influence_plan(a));
  ordered_json out{{"T", num(a.temp)}, {"N", a.n}, {"epsilon", num(a.epsilon)}, {"m", estimate_json(m)}};
  std::cout << out.dump() << '\n';
}

void run_corr(const InfluenceArgs& a) {
  const auto grid = harness::parse_int_list(a.grid);
  const auto c = correlation_length(a.temp, a.epsilon, grid, influence_plan(a));
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < c.m_field.size(); ++i) {
    rows.push_back({{"N", grid[i]}, {"m_field", estimate_json(c.m_field[i])}, {"m_zero", estimate_json(c.m_zero[i])}});
  }
  ordered_json out{{"T", num(a.temp)},
                   {"epsilon", num(a.epsilon)},
                   {"psi", c.value ? ordered_json(*c.value) : ordered_json("beyond-grid")},
                   {"grid", rows}};
  std::cout << out.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-field FK-Ising toolkit: exact enumeration, Monte Carlo, TV sweeps"};
  app.require_subcommand(1);

  ExactTvArgs ex;
  auto* c_exact = app.add_subcommand("exact-tv", "exact TV between the field and no-field laws on a small box");
  c_exact->add_option("--model", ex.model, "ising | fk")->check(CLI::IsMember({"ising", "fk", "rfim", "rffk"}));
  c_exact->add_option("--n", ex.n, "box half-side")->check(CLI::PositiveNumber);
  c_exact->add_option("--temp", ex.temp, "temperature");
  c_exact->add_option("--epsilon", ex.epsilon, "disorder strength");
  c_exact->add_option("--seed", ex.seed, "disorder seed");
  c_exact->add_option("--boundary", ex.boundary, "free | wired | plus | minus | zero");

  SampleArgs sa;
  auto* c_sample = app.add_subcommand("sample", "run Markov chains and write per-sample cluster statistics");
  c_sample->add_option("--model", sa.model, "rfim | rffk");
  c_sample->add_option("--n", sa.n, "box half-side")->check(CLI::PositiveNumber);
  c_sample->add_option("--temp", sa.temp, "temperature");
  c_sample->add_option("--epsilon", sa.epsilon, "disorder strength");
  c_sample->add_option("--boundary", sa.boundary, "free | wired | plus | minus | zero");
  c_sample->add_option("--sweeps", sa.sweeps, "sweeps per replica after burn-in");
  c_sample->add_option("--burn-in", sa.burn_in, "burn-in sweeps (-1: default)");
  c_sample->add_option("--thin", sa.thin, "thinning interval");
  c_sample->add_option("--replicas", sa.replicas, "independent replicas");
  c_sample->add_option("--seed", sa.seed, "chain seed base");
  auto* ds = c_sample->add_option("--disorder-seed", sa.disorder_seed, "disorder seed (default: --seed)");
  c_sample->add_option("--out", sa.out, "CSV path (default stdout)");

  StatsArgs st;
  auto* c_stats = app.add_subcommand("stats", "cluster statistics of an edge configuration file");
  c_stats->add_option("--in", st.in, "file of 0/1 edge states in edge-index order")->required();
  c_stats->add_option("--boundary", st.boundary, "free | wired");
  c_stats->add_option("--n", st.n, "box half-side (default: inferred from the edge count)");
  c_stats->add_option("--temp", st.temp, "temperature for F");
  c_stats->add_option("--epsilon", st.epsilon, "disorder strength for F");
  c_stats->add_option("--seed", st.seed, "disorder seed for F");

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "TV / Z(h) / concentration sweep over N");
  c_sweep->add_option("--model", sw.model, "rfim | rffk");
  c_sweep->add_option("--temp-regime", sw.regime, "low | crit | high")->check(CLI::IsMember({"low", "crit", "high"}));
  c_sweep->add_option("--temp", sw.temp, "explicit temperature (overrides the regime)");
  c_sweep->add_option("--alpha", sw.alpha, "auto or comma list of exponents");
  c_sweep->add_option("--theta", sw.config.theta, "schedule prefactor");
  c_sweep->add_option("--n-list", sw.n_list, "comma list of box half-sides");
  c_sweep->add_option("--disorder-seeds", sw.config.disorder_seeds, "number of disorder draws");
  c_sweep->add_option("--disorder-seed-base", sw.config.disorder_seed_base, "first disorder seed");
  c_sweep->add_option("--boundary", sw.config.boundary, "free | wired (rffk), plus | minus | zero (rfim)");
  c_sweep->add_option("--samples", sw.config.samples, "samples per replica");
  c_sweep->add_option("--burn-in", sw.config.burn_in, "burn-in sweeps (-1: default)");
  c_sweep->add_option("--thin", sw.config.thin, "thinning interval");
  c_sweep->add_option("--replicas", sw.config.replicas, "replicas per chain");
  c_sweep->add_option("--seed", sw.config.seed, "chain seed base");
  c_sweep->add_option("--out", sw.out, "CSV path ('-' for stdout)");
  c_sweep->add_option("--plot", sw.plot, "also write an SVG plot here");

  TailArgs ta;
  auto* c_tail = app.add_subcommand("ldp-tail", "cluster-size tables for the zero-field FK measure");
  c_tail->add_option("--p", ta.p, "edge parameter (default p_c)");
  c_tail->add_option("--n-list", ta.n_list, "comma list of box half-sides");
  c_tail->add_option("--boundary", ta.boundary, "free | wired");
  c_tail->add_option("--samples", ta.samples, "samples per replica");
  c_tail->add_option("--burn-in", ta.burn_in, "burn-in sweeps (-1: default)");
  c_tail->add_option("--thin", ta.thin, "thinning interval");
  c_tail->add_option("--replicas", ta.replicas, "replicas");
  c_tail->add_option("--seed", ta.seed, "chain seed base");
  c_tail->add_option("--out", ta.out, "optional per-sample CSV");

  InfluenceArgs ia;
  auto add_influence = [&](CLI::App* c) {
    c->add_option("--temp", ia.temp, "temperature");
    c->add_option("--epsilon", ia.epsilon, "disorder strength");
    c->add_option("--disorder-seeds", ia.disorder_seeds, "number of disorder draws");
    c->add_option("--disorder-seed-base", ia.disorder_seed_base, "first disorder seed");
    c->add_option("--samples", ia.samples, "samples per replica");
    c->add_option("--burn-in", ia.burn_in, "burn-in sweeps (-1: default)");
    c->add_option("--replicas", ia.replicas, "replicas");
    c->add_option("--seed", ia.seed, "chain seed base");
    c->add_option("--sampler", ia.sampler, "rffk (cluster) | rfim (heat bath)");
  };
  auto* c_inf = app.add_subcommand("boundary-influence", "disorder-averaged plus/minus origin magnetization gap");
  add_influence(c_inf);
  c_inf->add_option("--n", ia.n, "box half-side")->check(CLI::PositiveNumber);
  auto* c_corr = app.add_subcommand("corr-length", "first N on a grid where the field halves the boundary influence");
  add_influence(c_corr);
  c_corr->add_option("--grid", ia.grid, "increasing comma list of N");

  std::string plot_in, plot_out, plot_title = "TV vs N";
  auto* c_plot = app.add_subcommand("plot", "SVG plot of a sweep CSV");
  c_plot->add_option("--in", plot_in, "sweep CSV")->required();
  c_plot->add_option("--out", plot_out, "SVG path")->required();
  c_plot->add_option("--title", plot_title, "plot title");

  std::string config_path;
  auto* c_run = app.add_subcommand("run", "run an experiment config through the result store");
  c_run->add_option("--config", config_path, "INI experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  sa.disorder_seed_set = ds->count() > 0;

  try {
    if (*c_exact) run_exact_tv(ex);
    if (*c_sample) run_sample(sa);
    if (*c_stats) run_stats(st);
    if (*c_sweep) run_sweep_cmd(sw);
    if (*c_tail) run_tail(ta);
    if (*c_inf) run_influence(ia);
    if (*c_corr) run_corr(ia);
    if (*c_plot) harness::emit_plot(plot_in, plot_out, plot_title);
    if (*c_run) {
      const auto cfg = harness::ExperimentConfig::load(config_path);
      const auto r = harness::run_experiment(cfg, [](const std::string& msg) { std::cerr << msg << '\n'; });
      std::cout << ordered_json{{"hash", r.hash}, {"directory", r.directory.string()}, {"cache_hit", r.cache_hit}, {"rows", r.rows}}.dump()
                << '\n';
    }
  } catch (const GuardError& e) {
    std::cerr << "guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidParameter& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidGeometry& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidPartition& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SchemaError& e) {
    std::cerr << "schema: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
