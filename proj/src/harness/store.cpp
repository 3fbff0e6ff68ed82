#include "rffkim/harness/store.hpp"

#include <fstream>
#include <sstream>
#include <json.hpp>

#include "rffkim/errors.hpp"
#include "rffkim/format.hpp"
#include "rffkim/harness/plot.hpp"

namespace rffkim::harness {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << text;
  }
  fs::rename(tmp, path);
}

ordered_json chain_json(const ChainProvenance& p) {
  return ordered_json{{"seed_base", p.seed_base}, {"stream", p.stream}, {"replicas", p.replicas},
                      {"burn_in", p.burn_in},     {"thin", p.thin},     {"samples", p.samples}};
}

}  // namespace

std::string ResultStore::key(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.output_dir.clear();
  return fnv1a_hex(std::string(kCodeVersion) + "\n" + c.serialize());
}

bool ResultStore::contains(const std::string& hash) const { return fs::exists(entry_dir(hash) / "manifest.json"); }

std::string manifest_json(const ExperimentConfig& config, const std::string& hash, const std::vector<SweepRow>& rows,
                          const std::string& csv_text) {
  ordered_json m;
  m["hash"] = hash;
  m["code_version"] = kCodeVersion;
  m["name"] = config.name;
  m["config"] = config.serialize();
  m["csv"] = {{"file", "sweep.csv"}, {"fnv1a", fnv1a_hex(csv_text)}, {"rows", rows.size()}};
  m["plot"] = config.plot ? ordered_json("tv_vs_n.svg") : ordered_json(nullptr);
  ordered_json rj = ordered_json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    ordered_json row{{"row", i},
                     {"T", format_double(r.t)},
                     {"N", r.n},
                     {"epsilon", format_double(r.epsilon)},
                     {"alpha", format_double(r.alpha)},
                     {"unreliable_z", r.unreliable},
                     {"reference_chain", chain_json(r.reference)}};
    if (r.fk_reference.replicas > 0) row["fk_reference_chain"] = chain_json(r.fk_reference);
    ordered_json tilted = ordered_json::array();
    for (std::size_t d = 0; d < r.tilted.size(); ++d) {
      auto c = chain_json(r.tilted[d]);
      c["disorder_seed"] = r.disorder_seeds[d];
      tilted.push_back(std::move(c));
    }
    row["tilted_chains"] = std::move(tilted);
    rj.push_back(std::move(row));
  }
  m["rows"] = std::move(rj);
  return m.dump(2) + "\n";
}

void ResultStore::put(const ExperimentConfig& config, const std::vector<SweepRow>& rows) const {
  const auto hash = key(config);
  const auto dir = entry_dir(hash);
  if (contains(hash)) throw Error("result store already holds entry " + hash);
  fs::create_directories(dir);
  const auto csv = sweep_csv(rows);
  write_atomic(dir / "config.ini", config.serialize());
  write_atomic(dir / "sweep.csv", csv);
  if (config.plot && !rows.empty()) {
    std::istringstream in(csv);
    write_atomic(dir / "tv_vs_n.svg", render_tv_plot(read_csv(in), config.name));
  }
  write_atomic(dir / "manifest.json", manifest_json(config, hash, rows, csv));
  std::ofstream index(root_ / "index.jsonl", std::ios::app | std::ios::binary);
  index << ordered_json{{"hash", hash}, {"name", config.name}, {"rows", rows.size()}}.dump() << '\n';
}

RunResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  const ResultStore store(config.output_dir);
  RunResult r;
  r.hash = ResultStore::key(config);
  r.directory = store.entry_dir(r.hash);
  if (store.contains(r.hash)) {
    r.cache_hit = true;
    r.rows = read_csv_file(r.directory / "sweep.csv").rows.size();
    if (progress) progress("cache hit: " + r.hash);
    return r;
  }
  const auto rows = run_sweep(config, progress);
  store.put(config, rows);
  r.rows = rows.size();
  return r;
}

}  // namespace rffkim::harness
