#include "rffkim/disorder.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "rffkim/errors.hpp"
#include "rffkim/format.hpp"
#include "rffkim/rng.hpp"

namespace rffkim {

Coupling Coupling::from_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("temperature must be positive and finite");
  const double p = -std::expm1(-2.0 / t);
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("temperature gives a degenerate edge parameter");
  return Coupling(t, p);
}

Coupling Coupling::from_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("edge parameter p must lie in (0, 1)");
  return Coupling(-2.0 / std::log1p(-p), p);
}

Regime classify_temperature(double t) {
  if (!(t > 0.0)) throw InvalidParameter("temperature must be positive");
  const double rel = (t - constants::kCriticalT) / constants::kCriticalT;
  if (std::fabs(rel) <= constants::kRegimeTolerance) return Regime::Critical;
  return rel < 0.0 ? Regime::Low : Regime::High;
}

double alpha_exponent(double t) {
  switch (classify_temperature(t)) {
    case Regime::Low:
      return 1.0;
    case Regime::Critical:
      return 15.0 / 16.0;
    case Regime::High:
      break;
  }
  return 0.5;
}

double beta_exponent(double t) {
  switch (classify_temperature(t)) {
    case Regime::Low:
      return 1.0;
    case Regime::Critical:
      return 7.0 / 8.0;
    case Regime::High:
      break;
  }
  return 0.5;
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Low:
      return "low";
    case Regime::Critical:
      return "crit";
    case Regime::High:
      break;
  }
  return "high";
}

double epsilon_schedule(int n, double theta, double alpha) {
  if (n < 1) throw InvalidParameter("epsilon schedule needs N >= 1");
  if (!(theta > 0.0)) throw InvalidParameter("theta must be positive");
  return theta * std::pow(static_cast<double>(n), -alpha);
}

DisorderField DisorderField::with_epsilon(double eps) const {
  if (!(eps >= 0.0)) throw InvalidParameter("epsilon must be non-negative");
  DisorderField out = *this;
  out.epsilon = eps;
  return out;
}

double field_value(std::uint64_t seed, std::uint64_t vertex) {
  const CounterRng rng(seed, streams::kDisorder);
  return normal_quantile(open_unit(rng.at(vertex)));
}

DisorderField sample_field(const LatticeGraph& g, std::uint64_t seed, double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidParameter("epsilon must be non-negative");
  DisorderField f;
  f.seed = seed;
  f.epsilon = epsilon;
  f.values.resize(g.vertex_count());
  for (std::size_t v = 0; v < f.values.size(); ++v) f.values[v] = field_value(seed, v);
  return f;
}

double field_sum(const DisorderField& field, std::span<const int> subset) {
  double s = 0.0;
  for (int v : subset) {
    if (v < 0 || static_cast<std::size_t>(v) >= field.values.size()) {
      throw InvalidParameter("field_sum: vertex out of range");
    }
    s += field.values[static_cast<std::size_t>(v)];
  }
  return s;
}

void write_field_csv(std::ostream& out, const LatticeGraph& g, const DisorderField& field) {
  out << "vertex_index,x,y,h_value\n";
  for (std::size_t v = 0; v < field.values.size(); ++v) {
    const auto& s = g.site(static_cast<int>(v));
    out << v << ',' << s.x << ',' << s.y << ',' << format_double(field.values[v]) << '\n';
  }
}

DisorderField read_field_csv(std::istream& in, const LatticeGraph& g, double epsilon) {
  std::string line;
  if (!std::getline(in, line) || line != "vertex_index,x,y,h_value") {
    throw SchemaError("field CSV must start with header vertex_index,x,y,h_value");
  }
  DisorderField f;
  f.epsilon = epsilon;
  f.generator = "csv";
  f.values.assign(g.vertex_count(), 0.0);
  std::vector<std::uint8_t> seen(g.vertex_count(), 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell[4];
    for (auto& c : cell) {
      if (!std::getline(ss, c, ',')) throw SchemaError("field CSV row has fewer than 4 columns");
    }
    const long idx = std::stol(cell[0]);
    if (idx < 0 || static_cast<std::size_t>(idx) >= g.vertex_count()) throw SchemaError("vertex_index out of range");
    const Site s{std::stoi(cell[1]), std::stoi(cell[2])};
    if (!(g.site(static_cast<int>(idx)) == s)) throw SchemaError("coordinates do not match vertex_index");
    f.values[static_cast<std::size_t>(idx)] = parse_double(cell[3]);
    seen[static_cast<std::size_t>(idx)] = 1;
  }
  for (auto s : seen) {
    if (!s) throw SchemaError("field CSV does not cover every vertex");
  }
  return f;
}

}  // namespace rffkim
