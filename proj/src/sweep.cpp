#include "pfcsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "pfcsim/report.hpp"

namespace pfc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

SweepAxis make_axis(std::string_view key, std::string_view list) {
  SweepAxis axis;
  axis.key = std::string(trim(key));
  if (axis.key.empty()) throw ConfigError("sweep axis without a key");
  const auto keys = config_keys();
  if (std::none_of(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == axis.key; })) {
    throw ConfigError("sweep axis: unknown configuration key '" + axis.key + "'");
  }
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= list.size(); ++k) {
    const char c = k < list.size() ? list[k] : ',';
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      const auto value = trim(list.substr(start, k - start));
      if (value.empty()) throw ConfigError("sweep axis '" + axis.key + "': empty value");
      axis.values.emplace_back(value);
      start = k + 1;
    }
  }
  return axis;
}

void run_point(const SweepPoint& point, const SweepOptions& opts, SweepOutcome& outcome) {
  outcome.index = point.index;
  outcome.settings = point.settings;
  ScenarioConfig cfg = point.cfg;
  try {
    if (!opts.output_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "run_%04zu", point.index);
      const std::filesystem::path dir = std::filesystem::path(opts.output_dir) / name;
      std::filesystem::create_directories(dir);
      outcome.directory = dir.string();
      cfg.trace_path = (dir / "trace.csv").string();
      cfg.summary_path = (dir / "report.txt").string();
      cfg.metrics_path = (dir / "metrics.txt").string();
      std::ofstream(dir / "config.txt") << to_config_text(cfg);
    } else {
      cfg.trace_path.clear();
      cfg.summary_path.clear();
      cfg.metrics_path.clear();
    }
    const RunResult result = run_scenario(cfg);
    outcome.metrics = result.metrics;
    outcome.abort = result.abort;
    write_outputs(cfg, result);
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
}

}  // namespace

SweepAxis parse_sweep_axis(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("sweep axis '" + std::string(spec) + "': expected key=v1,v2,...");
  }
  return make_axis(spec.substr(0, eq), spec.substr(eq + 1));
}

std::vector<SweepAxis> parse_sweep_grid(std::string_view text) {
  std::vector<SweepAxis> axes;
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
    try {
      axes.push_back(parse_sweep_axis(line));
    } catch (const ConfigError& e) {
      throw ConfigError("grid line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return axes;
}

std::vector<SweepPoint> expand_grid(const ScenarioConfig& base, const std::vector<SweepAxis>& axes) {
  std::size_t total = 1;
  for (const SweepAxis& a : axes) {
    if (a.values.empty()) throw ConfigError("sweep axis '" + a.key + "' has no values");
    total *= a.values.size();
  }
  std::vector<SweepPoint> points;
  points.reserve(total);
  for (std::size_t n = 0; n < total; ++n) {
    SweepPoint point;
    point.index = n;
    point.cfg = base;
    std::size_t rest = n;
    std::vector<std::size_t> pick(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      pick[a] = rest % axes[a].values.size();
      rest /= axes[a].values.size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const std::string& value = axes[a].values[pick[a]];
      apply_setting(point.cfg, axes[a].key, value);
      point.settings.emplace_back(axes[a].key, value);
    }
    try {
      point.cfg.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("sweep point " + std::to_string(n) + ": " + e.what());
    }
    points.push_back(std::move(point));
  }
  return points;
}

std::vector<SweepOutcome> run_sweep(const std::vector<SweepPoint>& points, const SweepOptions& opts) {
  std::vector<SweepOutcome> outcomes(points.size());
  unsigned threads = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(points.size(), 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n = next++; n < points.size(); n = next++) run_point(points[n], opts, outcomes[n]);
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  if (!opts.output_dir.empty()) {
    std::filesystem::create_directories(opts.output_dir);
    const auto path = std::filesystem::path(opts.output_dir) / "sweep_summary.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_sweep_summary(out, outcomes);
  }
  return outcomes;
}

void write_sweep_summary(std::ostream& out, const std::vector<SweepOutcome>& outcomes) {
  const auto fields = metrics_fields(Metrics{});
  out << "index";
  if (!outcomes.empty()) {
    for (const auto& [key, value] : outcomes.front().settings) out << ',' << csv_field(key);
  }
  out << ",status";
  for (const auto& [name, value] : fields) out << ',' << name;
  out << '\n';
  for (const SweepOutcome& o : outcomes) {
    out << o.index;
    for (const auto& [key, value] : o.settings) out << ',' << csv_field(value);
    if (!o.error.empty()) {
      out << ",error";
    } else if (o.abort) {
      out << ",aborted:" << to_string(o.abort->kind);
    } else {
      out << ",ok";
    }
    if (o.metrics) {
      for (const auto& [name, value] : metrics_fields(*o.metrics)) out << ',' << format_double(value);
    } else {
      for (std::size_t k = 0; k < fields.size(); ++k) out << ",nan";
    }
    out << '\n';
  }
}

}  // namespace pfc
