#include "rffkim/harness/experiment.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "rffkim/estimators.hpp"
#include "rffkim/format.hpp"
#include "rffkim/parallel.hpp"

namespace rffkim::harness {

namespace {

ChainProvenance provenance(const ChainPlan& p, const ModelSpec& spec) {
  return {p.seed_base, p.stream, p.replicas, p.effective_burn_in(spec), p.thin, p.samples};
}

std::vector<double> flatten(const std::vector<std::vector<double>>& blocks) {
  std::vector<double> out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

struct SeedResult {
  double tv = 0.0;
  double tv_se = 0.0;
  double z = 0.0;
  double z_se = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  bool unreliable = false;
};

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  const double t = config.resolved_temperature();
  const auto alphas = config.resolved_alphas();
  const auto d_count = static_cast<std::size_t>(config.disorder_seeds);
  const ChainPlan base = config.chain_plan();
  std::vector<SweepRow> rows;

  for (int n : config.n_list) {
    const auto g = LatticeGraph::box(n);
    ModelSpec spec;
    spec.model = config.model;
    spec.graph = &g;
    spec.coupling = Coupling::from_temperature(t);
    spec.boundary = parse_boundary(config.resolved_boundary(), g);
    spec.field = sample_field(g, config.disorder_seed_base, 0.0);

    if (progress) progress("N=" + std::to_string(n) + ": zero-field reference chain");
    ChainPlan ref_plan = base;
    ref_plan.stream = streams::kChain;
    const auto reference = ReferenceSamples::collect(spec, ref_plan);

    // the P2/P3 columns live under the zero-field FK law
    ModelSpec fk_spec = spec;
    ChainPlan fk_plan = base;
    fk_plan.stream = streams::kChain + 2;
    std::optional<ReferenceSamples> fk_owned;
    if (config.model == ModelKind::Rfim) {
      fk_spec.model = ModelKind::Rffk;
      fk_spec.boundary = BoundaryCondition::fk_free();
      if (progress) progress("N=" + std::to_string(n) + ": zero-field FK chain for P2/P3");
      fk_owned = ReferenceSamples::collect(fk_spec, fk_plan);
    }
    const ReferenceSamples& fk_reference = fk_owned ? *fk_owned : reference;

    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const double eps = epsilon_schedule(n, config.theta, alphas[a]);
      SweepRow row;
      row.t = t;
      row.n = n;
      row.epsilon = eps;
      row.alpha = alphas[a];
      row.reference = provenance(ref_plan, spec);
      if (fk_owned) row.fk_reference = provenance(fk_plan, fk_spec);

      std::vector<SeedResult> per(d_count);
      std::vector<ChainPlan> tilted_plans(d_count);
      for (std::size_t d = 0; d < d_count; ++d) {
        row.disorder_seeds.push_back(config.disorder_seed_base + d);
        ChainPlan tp = base;
        tp.stream = streams::kChain + 1;
        tp.seed_base = base.seed_base + static_cast<std::uint64_t>(base.replicas) * (1 + a * d_count + d);
        tilted_plans[d] = tp;
      }
      if (progress) {
        progress("N=" + std::to_string(n) + " alpha=" + format_double(alphas[a]) + " eps=" + format_double(eps) + ": " +
                 std::to_string(d_count) + " disorder seeds");
      }
      parallel_for(d_count, [&](std::size_t d) {
        ModelSpec s = spec;
        s.field = sample_field(g, row.disorder_seeds[d], eps);
        RatioSamples rs;
        rs.reference = reference.statistic(s.field);
        rs.tilted = tilted_statistics(s, tilted_plans[d]);
        const auto z = estimate_partition_ratio(rs);
        const auto tv = estimate_tv_rn(rs, &z);
        const auto f_values = flatten(fk_reference.statistic(s.field));
        const auto ps = p_statistics(s.field, f_values, t, n, alphas[a]);
        per[d] = {tv.value, tv.std_error, z.bridge.value, z.bridge.std_error, ps.p2_exceed, ps.p3_exceed, z.unreliable};
      });
      for (std::size_t d = 0; d < d_count; ++d) row.tilted.push_back(provenance(tilted_plans[d], spec));

      std::vector<double> tv, z, p2, p3;
      for (const auto& r : per) {
        tv.push_back(r.tv);
        z.push_back(r.z);
        p2.push_back(r.p2);
        p3.push_back(r.p3);
        row.unreliable += r.unreliable;
      }
      const double dd = static_cast<double>(d_count);
      row.tv_mean = mean(tv);
      row.z_hat = mean(z);
      row.p2_exceed = mean(p2);
      row.p3_exceed = mean(p3);
      if (d_count >= 2) {
        row.tv_se = std::sqrt(variance(tv) / dd);
        row.z_se = std::sqrt(variance(z) / dd);
      } else {
        row.tv_se = per[0].tv_se;
        row.z_se = per[0].z_se;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << r.n << ',' << format_double(r.epsilon) << ',' << format_double(r.alpha) << ','
        << format_double(r.tv_mean) << ',' << format_double(r.tv_se) << ',' << format_double(r.z_hat) << ','
        << format_double(r.z_se) << ',' << format_double(r.p2_exceed) << ',' << format_double(r.p3_exceed) << '\n';
  }
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  write_sweep_csv(out, rows);
  return out.str();
}

}  // namespace rffkim::harness
