#pragma once

#include <iosfwd>
#include <string>

#include "pfcsim/simulation.hpp"
#include "pfcsim/steady_state.hpp"

namespace pfc {

/// "key = value" lines: status, abort details when aborted, then every
/// metrics field (17 significant digits).
void write_metrics_file(std::ostream& out, const RunResult& result);

/// Human-readable summary of a finished (or aborted) run.
void write_report(std::ostream& out, const ScenarioConfig& cfg, const RunResult& result);

/// Closed-form steady-state predictions at an operating point.
void write_oracle(std::ostream& out, const OperatingPoint& op, const PlantParams& p, double V_d);

/// Write trace, report and metrics to the paths named in cfg (empty paths
/// are skipped). Throws std::runtime_error on I/O failure.
void write_outputs(const ScenarioConfig& cfg, const RunResult& result);

}  // namespace pfc
