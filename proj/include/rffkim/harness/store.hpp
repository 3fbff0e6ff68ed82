#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rffkim/harness/config.hpp"
#include "rffkim/harness/experiment.hpp"

namespace rffkim::harness {

inline constexpr const char* kCodeVersion = "rffkim-1.0.0";

/// Append-only directory of experiment results.
///
///   <root>/index.jsonl          one line per stored run
///   <root>/<hash>/config.ini    canonical config
///   <root>/<hash>/sweep.csv     payload
///   <root>/<hash>/manifest.json provenance; written last, marks the entry complete
///   <root>/<hash>/tv_vs_n.svg   optional plot
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path root) : root_(std::move(root)) {}

  /// Content hash of (canonical config without the output directory, code version).
  [[nodiscard]] static std::string key(const ExperimentConfig& config);

  [[nodiscard]] const std::filesystem::path& root() const { return root_; }
  [[nodiscard]] std::filesystem::path entry_dir(const std::string& hash) const { return root_ / hash; }
  [[nodiscard]] bool contains(const std::string& hash) const;

  /// Writes one entry. Throws if the entry already exists.
  void put(const ExperimentConfig& config, const std::vector<SweepRow>& rows) const;

 private:
  std::filesystem::path root_;
};

struct RunResult {
  std::string hash;
  std::filesystem::path directory;
  bool cache_hit = false;
  std::size_t rows = 0;
};

/// Validates, then returns the stored entry or runs the sweep and stores it.
RunResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Manifest JSON text for a set of rows (exposed for tests).
std::string manifest_json(const ExperimentConfig& config, const std::string& hash, const std::vector<SweepRow>& rows,
                          const std::string& csv_text);

}  // namespace rffkim::harness
