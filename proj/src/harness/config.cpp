#include "rffkim/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rffkim/disorder.hpp"
#include "rffkim/errors.hpp"
#include "rffkim/format.hpp"

namespace rffkim::harness {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (trim(text.substr(pos)).size() != 0) throw std::invalid_argument(text);
    if constexpr (std::is_unsigned_v<T>) {
      if (v < 0) throw std::invalid_argument(text);
    }
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
  }
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    return parse_double(trim(text));
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'");
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

const char* const kKnown[] = {
    "experiment.name",  "experiment.model",    "experiment.regime",     "experiment.temperature",
    "experiment.boundary", "grid.n_list",      "grid.theta",            "grid.alphas",
    "chain.burn_in",    "chain.thin",          "chain.samples",         "chain.replicas",
    "chain.seed",       "disorder.seeds",      "disorder.seed_base",    "output.directory",
    "output.plot",      "guards.max_total_sweeps"};

}  // namespace

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + s + "'");
    out.push_back(parse_integer<int>("list", item));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + s + "'");
    out.push_back(parse_real("list", item));
  }
  return out;
}

double regime_temperature(const std::string& regime) {
  if (regime == "low") return 1.5;
  if (regime == "crit") return constants::kCriticalT;
  if (regime == "high") return 3.5;
  throw ConfigError("unknown temperature regime '" + regime + "' (expected low, crit or high)");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError("key '" + section + "' must sit inside a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      bool known = false;
      for (const char* k : kKnown) known = known || full == k;
      if (!known) throw ConfigError("unknown config key '" + full + "'");
    }
  }
  auto get = [&](const char* key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  };

  ExperimentConfig c;
  if (auto v = get("experiment.name")) c.name = *v;
  if (auto v = get("experiment.model")) c.model = parse_model(*v);
  if (auto v = get("experiment.regime")) c.regime = *v;
  if (auto v = get("experiment.temperature"); v && *v != "auto") c.temperature = parse_real("experiment.temperature", *v);
  if (auto v = get("experiment.boundary")) c.boundary = *v;
  if (auto v = get("grid.n_list")) c.n_list = parse_int_list(*v);
  if (auto v = get("grid.theta")) c.theta = parse_real("grid.theta", *v);
  if (auto v = get("grid.alphas"); v && *v != "auto") c.alphas = parse_double_list(*v);
  if (auto v = get("chain.burn_in")) c.burn_in = parse_integer<std::int64_t>("chain.burn_in", *v);
  if (auto v = get("chain.thin")) c.thin = parse_integer<std::int64_t>("chain.thin", *v);
  if (auto v = get("chain.samples")) c.samples = parse_integer<std::int64_t>("chain.samples", *v);
  if (auto v = get("chain.replicas")) c.replicas = parse_integer<int>("chain.replicas", *v);
  if (auto v = get("chain.seed")) c.seed = parse_integer<std::uint64_t>("chain.seed", *v);
  if (auto v = get("disorder.seeds")) c.disorder_seeds = parse_integer<int>("disorder.seeds", *v);
  if (auto v = get("disorder.seed_base")) c.disorder_seed_base = parse_integer<std::uint64_t>("disorder.seed_base", *v);
  if (auto v = get("output.directory")) c.output_dir = *v;
  if (auto v = get("output.plot")) c.plot = parse_bool("output.plot", *v);
  if (auto v = get("guards.max_total_sweeps")) {
    c.max_total_sweeps = parse_integer<std::int64_t>("guards.max_total_sweeps", *v);
  }
  return c;
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "[experiment]\n"
      << "name = " << name << '\n'
      << "model = " << model_name(model) << '\n'
      << "regime = " << regime << '\n'
      << "temperature = " << (temperature ? format_double(*temperature) : std::string("auto")) << '\n'
      << "boundary = " << boundary << '\n'
      << "\n[grid]\n"
      << "n_list = " << join(n_list) << '\n'
      << "theta = " << format_double(theta) << '\n'
      << "alphas = " << (alphas.empty() ? std::string("auto") : join(alphas)) << '\n'
      << "\n[chain]\n"
      << "burn_in = " << burn_in << '\n'
      << "thin = " << thin << '\n'
      << "samples = " << samples << '\n'
      << "replicas = " << replicas << '\n'
      << "seed = " << seed << '\n'
      << "\n[disorder]\n"
      << "seeds = " << disorder_seeds << '\n'
      << "seed_base = " << disorder_seed_base << '\n'
      << "\n[output]\n"
      << "directory = " << output_dir << '\n'
      << "plot = " << (plot ? "true" : "false") << '\n'
      << "\n[guards]\n"
      << "max_total_sweeps = " << max_total_sweeps << '\n';
  return out.str();
}

double ExperimentConfig::resolved_temperature() const {
  if (temperature) return *temperature;
  return regime_temperature(regime);
}

std::vector<double> ExperimentConfig::resolved_alphas() const {
  if (!alphas.empty()) return alphas;
  return {alpha_exponent(resolved_temperature())};
}

std::string ExperimentConfig::resolved_boundary() const {
  if (!boundary.empty()) return boundary;
  return model == ModelKind::Rffk ? "free" : "zero";
}

ChainPlan ExperimentConfig::chain_plan() const {
  ChainPlan p;
  p.burn_in = burn_in;
  p.thin = thin;
  p.samples = samples;
  p.replicas = replicas;
  p.seed_base = seed;
  return p;
}

std::int64_t ExperimentConfig::planned_sweeps() const {
  const double t = resolved_temperature();
  const auto n_alpha = static_cast<std::int64_t>(resolved_alphas().size());
  std::int64_t total = 0;
  for (int n : n_list) {
    const auto g = LatticeGraph::box(n);
    const std::int64_t burn = burn_in >= 0 ? burn_in : default_burn_in(g, t);
    const std::int64_t per_chain = burn + thin * samples;
    // reference chain(s) plus one tilted chain per (alpha, disorder seed)
    const std::int64_t chains = (model == ModelKind::Rfim ? 2 : 1) + n_alpha * disorder_seeds;
    total += chains * replicas * per_chain;
    if (total > limits::kMaxTotalSweeps * 10) break;
  }
  return total;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("experiment.name must not be empty");
  if (!temperature) regime_temperature(regime);
  const double t = resolved_temperature();
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("experiment.temperature must be positive");
  const auto b = resolved_boundary();
  if (b != "free" && b != "wired" && b != "plus" && b != "minus" && b != "zero") {
    throw ConfigError("experiment.boundary must be free, wired, plus, minus or zero");
  }
  if (model == ModelKind::Rfim && b != "plus" && b != "minus" && b != "zero") {
    throw ConfigError("the rfim model needs a spin boundary (plus, minus or zero)");
  }
  if (model == ModelKind::Rffk && b != "free" && b != "wired") {
    throw ConfigError("the rffk sweep needs an FK boundary (free or wired)");
  }
  for (int n : n_list) {
    if (n < 1) throw ConfigError("grid.n_list entries must be positive");
  }
  if (!(theta > 0.0)) throw ConfigError("grid.theta must be positive");
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("grid.alphas entries must be non-negative");
  }
  if (thin < 1) throw ConfigError("chain.thin must be positive");
  if (samples < 1) throw ConfigError("chain.samples must be positive");
  if (replicas < 1) throw ConfigError("chain.replicas must be positive");
  if (burn_in < -1) throw ConfigError("chain.burn_in must be -1 (default) or non-negative");
  if (disorder_seeds < 1) throw ConfigError("disorder.seeds must be positive");
  if (output_dir.empty()) throw ConfigError("output.directory must not be empty");
  if (max_total_sweeps < 1) throw ConfigError("guards.max_total_sweeps must be positive");
  const std::int64_t limit = std::min(max_total_sweeps, limits::kMaxTotalSweeps);
  const std::int64_t planned = planned_sweeps();
  if (planned > limit) {
    throw GuardError("experiment needs " + std::to_string(planned) + " sweeps, above max_total_sweeps = " +
                     std::to_string(limit));
  }
}

}  // namespace rffkim::harness
