#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfcsim/simulation.hpp"

namespace pfc {

/// One grid dimension: a config key and the values it takes.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// "key=v1,v2,...". Commas inside [...] do not split, so event schedules
/// can be swept. Throws ConfigError.
SweepAxis parse_sweep_axis(std::string_view spec);

/// Grid file: one "key = v1, v2" axis per line, '#' comments.
std::vector<SweepAxis> parse_sweep_grid(std::string_view text);

struct SweepPoint {
  std::size_t index = 0;
  std::vector<std::pair<std::string, std::string>> settings;
  ScenarioConfig cfg;
};

/// Cartesian product, last axis varying fastest. Every point is validated
/// up front. Throws ConfigError naming the offending point.
std::vector<SweepPoint> expand_grid(const ScenarioConfig& base, const std::vector<SweepAxis>& axes);

struct SweepOptions {
  unsigned threads = 0;    // 0: hardware concurrency
  std::string output_dir;  // empty: nothing written
};

struct SweepOutcome {
  std::size_t index = 0;
  std::vector<std::pair<std::string, std::string>> settings;
  std::optional<Metrics> metrics;
  std::optional<AbortInfo> abort;
  std::string error;      // I/O or other failure
  std::string directory;  // per-scenario output directory, if any
};

/// Run every point, one scenario per worker thread. With an output
/// directory, each point gets run_NNNN/ holding its config, trace, report
/// and metrics, and sweep_summary.csv is written at the top level.
std::vector<SweepOutcome> run_sweep(const std::vector<SweepPoint>& points,
                                    const SweepOptions& opts = {});

/// One CSV row per outcome: index, swept settings, status, metrics.
void write_sweep_summary(std::ostream& out, const std::vector<SweepOutcome>& outcomes);

}  // namespace pfc
