#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rffkim::harness {

/// Header-keyed CSV table (all cells kept as text).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index; throws SchemaError naming the column when absent.
  [[nodiscard]] std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// SVG line plot of tv_mean +- tv_se against N, one series per schedule
/// (alpha, and T when several temperatures are present).
std::string render_tv_plot(const CsvTable& table, const std::string& title = "TV vs N");

void emit_plot(const std::filesystem::path& csv, const std::filesystem::path& svg, const std::string& title = "TV vs N");

}  // namespace rffkim::harness
