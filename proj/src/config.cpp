#include "pfcsim/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pfcsim/errors.hpp"

namespace pfc {

const char* to_string(PlantModel model) noexcept {
  return model == PlantModel::averaged ? "averaged" : "switched";
}

const char* to_string(Event::Target target) noexcept {
  switch (target) {
    case Event::Target::G:
      return "G";
    case Event::Target::E:
      return "E";
    case Event::Target::R_s:
      return "R_s";
  }
  return "?";
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(value)) {
    throw ConfigError("key '" + std::string(key) + "': expected a finite number, got '" +
                      std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("key '" + std::string(key) + "': expected an integer, got '" +
                      std::string(text) + "'");
  }
  return value;
}

std::optional<double> parse_optional(std::string_view key, std::string_view text) {
  if (trim(text) == "auto") return std::nullopt;
  return parse_double(key, text);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("auto");
}

ControlMode parse_mode(std::string_view text) {
  text = trim(text);
  if (text == "baseline" || text == "baseline-known-parameters") return ControlMode::baseline;
  if (text == "adaptive" || text == "adaptive-sensorless") return ControlMode::adaptive;
  if (text == "observer-only" || text == "observer") return ControlMode::observer_only;
  throw ConfigError("controller.mode must be baseline, adaptive or observer-only, got '" +
                    std::string(text) + "'");
}

PlantModel parse_model(std::string_view text) {
  text = trim(text);
  if (text == "averaged") return PlantModel::averaged;
  if (text == "switched") return PlantModel::switched;
  throw ConfigError("plant.model must be averaged or switched, got '" + std::string(text) + "'");
}

std::string format_events(const std::vector<Event>& events) {
  std::string out;
  for (const Event& e : events) {
    if (!out.empty()) out += ' ';
    out += "[t=" + format_double(e.t) + ' ' + to_string(e.target) + '=' + format_double(e.value) +
           ']';
  }
  return out.empty() ? "[]" : out;
}

using Setter = void (*)(ScenarioConfig&, std::string_view, std::string_view);
using Getter = std::string (*)(const ScenarioConfig&);

struct KeyEntry {
  ConfigKey info;
  Setter set;
  Getter get;
};

#define PFC_DOUBLE_KEY(NAME, HELP, FIELD)                                                   \
  KeyEntry {                                                                                \
    {NAME, HELP},                                                                           \
        [](ScenarioConfig& c, std::string_view k, std::string_view v) {                     \
          c.FIELD = parse_double(k, v);                                                     \
        },                                                                                  \
        [](const ScenarioConfig& c) { return format_double(c.FIELD); }                      \
  }

// Off-diagonal matrix entries keep the matrix symmetric.
#define PFC_SYM_KEY(NAME, HELP, MATRIX)                                                     \
  KeyEntry {                                                                                \
    {NAME, HELP},                                                                           \
        [](ScenarioConfig& c, std::string_view k, std::string_view v) {                     \
          const double x = parse_double(k, v);                                              \
          c.MATRIX(0, 1) = x;                                                               \
          c.MATRIX(1, 0) = x;                                                               \
        },                                                                                  \
        [](const ScenarioConfig& c) { return format_double(c.MATRIX(0, 1)); }               \
  }

const std::vector<KeyEntry>& key_table() {
  static const std::vector<KeyEntry> table = {
      PFC_DOUBLE_KEY("plant.L", "inductance [H]", plant.L),
      PFC_DOUBLE_KEY("plant.C", "output capacitance [F]", plant.C),
      PFC_DOUBLE_KEY("plant.G", "load conductance [S]", plant.G),
      PFC_DOUBLE_KEY("plant.E", "source amplitude [V]", plant.E),
      PFC_DOUBLE_KEY("plant.omega", "line angular frequency [rad/s]", plant.omega),
      PFC_DOUBLE_KEY("plant.R_s", "source series resistance, unknown to the estimator [ohm]",
                     plant.R_s),
      KeyEntry{{"plant.model", "averaged | switched"},
               [](ScenarioConfig& c, std::string_view, std::string_view v) {
                 c.model = parse_model(v);
               },
               [](const ScenarioConfig& c) { return std::string(to_string(c.model)); }},
      PFC_DOUBLE_KEY("plant.carrier_hz", "PWM carrier frequency for the switched model [Hz]",
                     carrier_hz),
      PFC_DOUBLE_KEY("plant.i0", "initial inductor current [A]", plant_init.i),
      PFC_DOUBLE_KEY("plant.v0", "initial output voltage [V]", plant_init.v),

      PFC_DOUBLE_KEY("estimator.k", "scalar estimator gain", estimator.k),
      PFC_DOUBLE_KEY("estimator.J11", "adaptation weight J(1,1) (E direction)",
                     estimator.J(0, 0)),
      PFC_SYM_KEY("estimator.J12", "adaptation weight J(1,2) = J(2,1)", estimator.J),
      PFC_DOUBLE_KEY("estimator.J22", "adaptation weight J(2,2) (G direction)",
                     estimator.J(1, 1)),
      PFC_DOUBLE_KEY("estimator.D11", "filter weight D(1,1)", estimator.D(0, 0)),
      PFC_SYM_KEY("estimator.D12", "filter weight D(1,2) = D(2,1)", estimator.D),
      PFC_DOUBLE_KEY("estimator.D22", "filter weight D(2,2)", estimator.D(1, 1)),
      PFC_DOUBLE_KEY("estimator.mu1_0", "initial filter state mu1", estimator_init.mu(0)),
      PFC_DOUBLE_KEY("estimator.mu2_0", "initial filter state mu2", estimator_init.mu(1)),
      PFC_DOUBLE_KEY("estimator.zeta1_0", "initial estimator state zeta1",
                     estimator_init.zeta(0)),
      PFC_DOUBLE_KEY("estimator.zeta2_0", "initial estimator state zeta2",
                     estimator_init.zeta(1)),
      PFC_DOUBLE_KEY("estimator.zeta3_0", "initial estimator state zeta3",
                     estimator_init.zeta(2)),

      KeyEntry{{"controller.mode", "baseline | adaptive | observer-only"},
               [](ScenarioConfig& c, std::string_view, std::string_view v) {
                 c.mode = parse_mode(v);
               },
               [](const ScenarioConfig& c) { return std::string(to_string(c.mode)); }},
      PFC_DOUBLE_KEY("controller.a", "resonant filter numerator coefficient a", controller.a),
      PFC_DOUBLE_KEY("controller.b", "resonant filter numerator coefficient b", controller.b),
      PFC_DOUBLE_KEY("controller.c", "baseline filter gain c", controller.c),
      KeyEntry{{"controller.d", "adaptive filter gain d, or auto for c/E"},
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.controller.d = parse_optional(k, v);
               },
               [](const ScenarioConfig& c) { return format_optional(c.controller.d); }},
      PFC_DOUBLE_KEY("controller.ell", "current-loop gain [ohm]", controller.ell),
      PFC_DOUBLE_KEY("controller.V_d", "desired output voltage [V]", controller.V_d),
      PFC_DOUBLE_KEY("controller.v_min", "singularity threshold on v [V]", controller.v_min),
      KeyEntry{{"controller.denominator_exponent", "resonant denominator s^2 + omega^n, n = 1 or 2"},
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.controller.denominator_exponent = parse_int(k, v);
               },
               [](const ScenarioConfig& c) {
                 return std::to_string(c.controller.denominator_exponent);
               }},
      PFC_DOUBLE_KEY("controller.u0", "initial duty value", controller_init.u),
      PFC_DOUBLE_KEY("controller.x1_0", "initial resonant filter state x1",
                     controller_init.x(0)),
      PFC_DOUBLE_KEY("controller.x2_0", "initial resonant filter state x2",
                     controller_init.x(1)),

      PFC_DOUBLE_KEY("sim.dt", "integration step [s]", dt),
      PFC_DOUBLE_KEY("sim.duration", "simulated time [s]", duration),
      KeyEntry{{"sim.stride", "integration steps per trace row"},
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.stride = parse_int(k, v);
               },
               [](const ScenarioConfig& c) { return std::to_string(c.stride); }},
      KeyEntry{{"sim.metrics_cycles", "final line cycles used for metrics"},
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.metrics_cycles = parse_int(k, v);
               },
               [](const ScenarioConfig& c) { return std::to_string(c.metrics_cycles); }},
      KeyEntry{{"pe.T0", "PE window length [s], or auto for one line period"},
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.pe_T0 = parse_optional(k, v);
               },
               [](const ScenarioConfig& c) { return format_optional(c.pe_T0); }},
      KeyEntry{{"pe.stride", "PE sample spacing [s], or auto for sim.dt"},
               [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                 c.pe_stride = parse_optional(k, v);
               },
               [](const ScenarioConfig& c) { return format_optional(c.pe_stride); }},

      KeyEntry{{"events", "timed parameter steps, e.g. [t=0.5 G=0.03] [t=0.8 E=140]"},
               [](ScenarioConfig& c, std::string_view, std::string_view v) {
                 c.events = parse_events(v);
               },
               [](const ScenarioConfig& c) { return format_events(c.events); }},

      KeyEntry{{"output.trace", "trace CSV path (empty: none)"},
               [](ScenarioConfig& c, std::string_view, std::string_view v) {
                 c.trace_path = std::string(trim(v));
               },
               [](const ScenarioConfig& c) { return c.trace_path; }},
      KeyEntry{{"output.summary", "human-readable report path (empty: none)"},
               [](ScenarioConfig& c, std::string_view, std::string_view v) {
                 c.summary_path = std::string(trim(v));
               },
               [](const ScenarioConfig& c) { return c.summary_path; }},
      KeyEntry{{"output.metrics", "key-value metrics path (empty: none)"},
               [](ScenarioConfig& c, std::string_view, std::string_view v) {
                 c.metrics_path = std::string(trim(v));
               },
               [](const ScenarioConfig& c) { return c.metrics_path; }},
  };
  return table;
}

#undef PFC_DOUBLE_KEY
#undef PFC_SYM_KEY

const KeyEntry& find_key(std::string_view key) {
  const auto& table = key_table();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const KeyEntry& e) { return e.info.name == key; });
  if (it == table.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  return *it;
}

template <typename F>
void wrap_domain_errors(F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::span<const ConfigKey> config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const KeyEntry& e : key_table()) out.push_back(e.info);
    return out;
  }();
  return keys;
}

void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  find_key(trim(key)).set(cfg, trim(key), value);
}

std::string get_setting(const ScenarioConfig& cfg, std::string_view key) {
  return find_key(trim(key)).get(cfg);
}

std::vector<Event> parse_events(std::string_view text) {
  std::vector<Event> events;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find('[', pos);
    if (open == std::string_view::npos) {
      const auto rest = trim(text.substr(pos));
      if (!rest.empty() && rest != ",") {
        throw ConfigError("events: unexpected text '" + std::string(rest) + "'");
      }
      break;
    }
    const auto between = trim(text.substr(pos, open - pos));
    if (!between.empty() && between != ",") {
      throw ConfigError("events: unexpected text '" + std::string(between) + "'");
    }
    const auto close = text.find(']', open);
    if (close == std::string_view::npos) throw ConfigError("events: missing ']'");
    const auto inside = trim(text.substr(open + 1, close - open - 1));
    pos = close + 1;
    if (inside.empty()) continue;  // "[]" is the empty schedule
    std::istringstream body{std::string(inside)};

    std::optional<double> when;
    std::vector<std::pair<Event::Target, double>> changes;
    std::string token;
    while (body >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw ConfigError("events: expected name=value, got '" + token + "'");
      const std::string name = token.substr(0, eq);
      const double value = parse_double("events", std::string_view(token).substr(eq + 1));
      if (name == "t") {
        when = value;
      } else if (name == "G") {
        changes.emplace_back(Event::Target::G, value);
      } else if (name == "E") {
        changes.emplace_back(Event::Target::E, value);
      } else if (name == "R_s") {
        changes.emplace_back(Event::Target::R_s, value);
      } else {
        throw ConfigError("events: unknown parameter '" + name + "' (expected G, E or R_s)");
      }
    }
    if (!when) throw ConfigError("events: every entry needs t=<seconds>");
    if (changes.empty()) throw ConfigError("events: entry at t=" + format_double(*when) + " changes nothing");
    for (const auto& [target, value] : changes) events.push_back({*when, target, value});
  }
  return events;
}

ScenarioConfig parse_config(std::string_view text, ScenarioConfig base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

std::string to_config_text(const ScenarioConfig& cfg) {
  std::string out;
  for (const KeyEntry& e : key_table()) {
    out += std::string(e.info.name) + " = " + e.get(cfg) + '\n';
  }
  return out;
}

PEConfig ScenarioConfig::pe_config() const {
  return {pe_T0.value_or(plant.period()), pe_stride.value_or(dt)};
}

void ScenarioConfig::validate_structure() const {
  wrap_domain_errors([&] {
    plant.validate();
    estimator.validate();
    controller.validate(plant.E);
    pe_config().validate();
  });
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sim.dt must be positive");
  if (stride < 1) throw ConfigError("sim.stride must be at least 1");
  if (metrics_cycles < 1) throw ConfigError("sim.metrics_cycles must be at least 1");
  if (!(plant_init.v > 0.0)) throw ConfigError("plant.v0 must be positive");
  if (!std::isfinite(plant_init.i)) throw ConfigError("plant.i0 must be finite");
  if (!(std::abs(controller_init.u) <= 1.0)) throw ConfigError("controller.u0 must lie in [-1, 1]");
  if (!controller_init.x.allFinite() || !estimator_init.mu.allFinite() ||
      !estimator_init.zeta.allFinite()) {
    throw ConfigError("initial states must be finite");
  }
  const PEConfig pe = pe_config();
  const double ratio = pe.stride / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
    throw ConfigError("pe.stride must be a positive integer multiple of sim.dt");
  }
  if (model == PlantModel::switched) {
    if (!(carrier_hz > 0.0)) throw ConfigError("plant.carrier_hz must be positive");
    if (dt > 0.05 / carrier_hz) {
      throw ConfigError("switched model needs at least 20 integration steps per carrier period");
    }
  }
  double previous = 0.0;
  for (const Event& e : events) {
    if (!(e.t >= 0.0)) throw ConfigError("event times must be non-negative");
    if (e.t < previous) throw ConfigError("events must be listed in time order");
    previous = e.t;
    const bool ok = e.target == Event::Target::R_s ? e.value >= 0.0 : e.value > 0.0;
    if (!ok || !std::isfinite(e.value)) {
      throw ConfigError(std::string("event value for ") + to_string(e.target) + " out of range");
    }
  }
}

void ScenarioConfig::validate() const {
  validate_structure();
  const double periods = duration / plant.period();
  if (!(periods >= 10.0 - 1e-9)) {
    throw ConfigError("sim.duration must cover at least 10 line periods (" +
                      format_double(10.0 * plant.period()) + " s)");
  }
  if (metrics_cycles > periods + 1e-9) {
    throw ConfigError("sim.metrics_cycles exceeds the simulated duration");
  }
}

PlantParams params_at(const ScenarioConfig& cfg, double t) {
  PlantParams p = cfg.plant;
  for (const Event& e : cfg.events) {
    if (e.t > t) break;
    switch (e.target) {
      case Event::Target::G:
        p.G = e.value;
        break;
      case Event::Target::E:
        p.E = e.value;
        break;
      case Event::Target::R_s:
        p.R_s = e.value;
        break;
    }
  }
  return p;
}

}  // namespace pfc
