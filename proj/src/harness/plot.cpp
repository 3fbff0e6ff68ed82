#include "rffkim/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rffkim/errors.hpp"
#include "rffkim/format.hpp"

namespace rffkim::harness {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string fixed(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Point {
  double n, tv, se;
};

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw SchemaError("CSV is missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size()) throw SchemaError("CSV row has " + std::to_string(row.size()) + " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open CSV '" + path.string() + "'");
  return read_csv(in);
}

std::string render_tv_plot(const CsvTable& table, const std::string& title) {
  const std::size_t cn = table.column("N"), ca = table.column("alpha"), cm = table.column("tv_mean"),
                    cs = table.column("tv_se");
  const auto ct = std::find(table.header.begin(), table.header.end(), "T");
  const bool has_t = ct != table.header.end();
  std::vector<std::string> temps;
  if (has_t) {
    for (const auto& r : table.rows) {
      const auto& v = r[static_cast<std::size_t>(ct - table.header.begin())];
      if (std::find(temps.begin(), temps.end(), v) == temps.end()) temps.push_back(v);
    }
  }

  // series in first-appearance order
  std::vector<std::string> names;
  std::vector<std::vector<Point>> series;
  for (const auto& r : table.rows) {
    std::string name = "alpha=" + format_double(parse_double(r[ca]));
    if (temps.size() > 1) name = "T=" + format_double(parse_double(r[static_cast<std::size_t>(ct - table.header.begin())])) + ", " + name;
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      names.push_back(name);
      series.emplace_back();
      it = names.end() - 1;
    }
    series[static_cast<std::size_t>(it - names.begin())].push_back({parse_double(r[cn]), parse_double(r[cm]), parse_double(r[cs])});
  }
  for (auto& s : series) std::sort(s.begin(), s.end(), [](const Point& a, const Point& b) { return a.n < b.n; });

  const double w = 640, h = 400, left = 70, right = 170, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  std::vector<double> ns;
  double ymax = 0.0;
  for (const auto& s : series) {
    for (const auto& p : s) {
      ns.push_back(p.n);
      ymax = std::max(ymax, p.tv + p.se);
    }
  }
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  ymax = ymax <= 0.0 ? 1.0 : std::min(1.0, std::ceil(ymax * 10.0) / 10.0);
  if (ymax <= 0.0) ymax = 1.0;
  const bool log_x = !ns.empty() && ns.front() > 0.0;
  auto xv = [&](double n) { return log_x ? std::log2(n) : n; };
  const double x0 = ns.empty() ? 0.0 : xv(ns.front()), x1 = ns.empty() ? 1.0 : xv(ns.back());
  const double pad = 0.06 * pw;
  auto px = [&](double n) { return x1 > x0 ? left + pad + (xv(n) - x0) / (x1 - x0) * (pw - 2.0 * pad) : left + pw / 2.0; };
  auto py = [&](double y) { return top + (1.0 - y / ymax) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
  for (double n : ns) {
    o << "<line x1=\"" << fixed(px(n)) << "\" y1=\"" << top + ph << "\" x2=\"" << fixed(px(n)) << "\" y2=\"" << top + ph + 5
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fixed(px(n)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << format_double(n) << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double y = ymax * k / 5.0;
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << fixed(py(y)) << "\" x2=\"" << left << "\" y2=\"" << fixed(py(y))
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << fixed(py(y) + 4) << "\" text-anchor=\"end\">" << fixed(y) << "</text>\n";
  }
  o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">N</text>\n";
  o << "<text x=\"18\" y=\"" << fixed(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << fixed(top + ph / 2)
    << ")\">TV estimate</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % (sizeof kColors / sizeof kColors[0])];
    const auto& s = series[i];
    o << "<g class=\"series\" data-name=\"" << escape(names[i]) << "\">\n";
    if (s.size() > 1) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < s.size(); ++k) o << (k ? " " : "") << fixed(px(s[k].n)) << ',' << fixed(py(s[k].tv));
      o << "\"/>\n";
    }
    for (const auto& p : s) {
      const double lo = std::max(0.0, p.tv - p.se), hi = std::min(ymax, p.tv + p.se);
      o << "<line x1=\"" << fixed(px(p.n)) << "\" y1=\"" << fixed(py(lo)) << "\" x2=\"" << fixed(px(p.n)) << "\" y2=\""
        << fixed(py(hi)) << "\" stroke=\"" << color << "\"/>\n";
      o << "<circle class=\"marker\" cx=\"" << fixed(px(p.n)) << "\" cy=\"" << fixed(py(p.tv)) << "\" r=\"3.5\" fill=\"" << color
        << "\"/>\n";
    }
    o << "</g>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(i);
    o << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << fixed(ly) << "\" x2=\"" << left + pw + 35 << "\" y2=\"" << fixed(ly)
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text class=\"legend\" x=\"" << left + pw + 40 << "\" y=\"" << fixed(ly + 4) << "\">" << escape(names[i]) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void emit_plot(const std::filesystem::path& csv, const std::filesystem::path& svg, const std::string& title) {
  const auto table = read_csv_file(csv);
  const auto text = render_tv_plot(table, title);
  std::ofstream out(svg, std::ios::binary);
  if (!out) throw Error("cannot write '" + svg.string() + "'");
  out << text;
}

}  // namespace rffkim::harness
