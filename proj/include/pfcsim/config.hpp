#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pfcsim/controller.hpp"
#include "pfcsim/estimator.hpp"
#include "pfcsim/plant.hpp"

namespace pfc {

enum class PlantModel { averaged, switched };

const char* to_string(PlantModel model) noexcept;

/// Timed step change of a plant parameter.
struct Event {
  enum class Target { G, E, R_s };

  double t = 0.0;
  Target target = Target::G;
  double value = 0.0;
};

const char* to_string(Event::Target target) noexcept;

struct ScenarioConfig {
  PlantParams plant;
  PlantModel model = PlantModel::averaged;
  double carrier_hz = 20000.0;
  PlantState plant_init{0.0, 155.563};

  EstimatorGains estimator;
  EstimatorState estimator_init;

  ControlMode mode = ControlMode::adaptive;
  ControllerGains controller;
  ControllerState controller_init;

  double dt = 1e-5;
  double duration = 1.0;
  int stride = 10;
  int metrics_cycles = 5;
  std::optional<double> pe_T0;      // default: one line period
  std::optional<double> pe_stride;  // default: dt

  std::vector<Event> events;

  std::string trace_path;
  std::string summary_path;
  std::string metrics_path;

  PEConfig pe_config() const;

  /// Everything except the minimum-duration rule; enough to drive a
  /// Simulator for short runs. Throws ConfigError.
  void validate_structure() const;
  /// Full scenario validation, including duration >= 10 line periods.
  void validate() const;
};

/// Plant parameters in force at time t after applying scheduled events.
PlantParams params_at(const ScenarioConfig& cfg, double t);

struct ConfigKey {
  std::string_view name;
  std::string_view help;
};

std::span<const ConfigKey> config_keys();

/// Set one dotted key from its textual value. Throws ConfigError.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

std::string get_setting(const ScenarioConfig& cfg, std::string_view key);

/// Parse "key = value" lines ('#' starts a comment) on top of base.
ScenarioConfig parse_config(std::string_view text, ScenarioConfig base = {});

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base = {});

/// Render every key; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const ScenarioConfig& cfg);

std::vector<Event> parse_events(std::string_view text);

/// Round-trip formatting used for every floating-point output.
std::string format_double(double value);

}  // namespace pfc
