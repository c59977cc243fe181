// pfcsim command-line front end. Talks to the library only through pfcsim.h.

#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfcsim/pfcsim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

int exit_code(pfc_status status) {
  switch (status) {
    case PFC_OK: return kExitOk;
    case PFC_ERR_ARGUMENT:
    case PFC_ERR_CONFIG: return kExitConfig;
    case PFC_ERR_NUMERICAL: return kExitNumerical;
    case PFC_ERR_CHECK_FAILED: return kExitCheck;
    default: return kExitFailure;
  }
}

int report(pfc_status status) {
  if (status != PFC_OK) {
    std::fprintf(stderr, "pfcsim: %s: %s\n", pfc_status_name(status), pfc_last_error());
  }
  return exit_code(status);
}

struct ScenarioDeleter {
  void operator()(pfc_scenario* s) const { pfc_scenario_destroy(s); }
};
struct ResultDeleter {
  void operator()(pfc_result* r) const { pfc_result_destroy(r); }
};
using ScenarioPtr = std::unique_ptr<pfc_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<pfc_result, ResultDeleter>;

// --config plus one --<dotted.key> flag per configuration key.
struct ScenarioOptions {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;  // key, value storage
  std::vector<CLI::Option*> flags;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "scenario config file (key = value lines)")
        ->check(CLI::ExistingFile);
    const size_t n = pfc_config_key_count();
    overrides.resize(n);
    for (size_t k = 0; k < n; ++k) {
      overrides[k].first = pfc_config_key_name(k);
      flags.push_back(cmd->add_option("--" + overrides[k].first, overrides[k].second,
                                      pfc_config_key_help(k))
                          ->group("Configuration overrides"));
    }
  }

  // File first, then command-line overrides on top.
  pfc_status build(ScenarioPtr& out) const {
    pfc_scenario* raw = nullptr;
    pfc_status st = pfc_scenario_create(&raw);
    if (st != PFC_OK) return st;
    out.reset(raw);
    if (!config_path.empty() && (st = pfc_scenario_load_file(raw, config_path.c_str())) != PFC_OK) {
      return st;
    }
    for (size_t k = 0; k < flags.size(); ++k) {
      if (flags[k]->count() == 0) continue;
      st = pfc_scenario_set(raw, overrides[k].first.c_str(), overrides[k].second.c_str());
      if (st != PFC_OK) return st;
    }
    return PFC_OK;
  }
};

int cmd_run(const ScenarioOptions& so, bool quiet, bool print_metrics) {
  ScenarioPtr scenario;
  if (pfc_status st = so.build(scenario); st != PFC_OK) return report(st);
  if (pfc_status st = pfc_scenario_validate(scenario.get()); st != PFC_OK) return report(st);

  pfc_result* raw = nullptr;
  const pfc_status run_status = pfc_run(scenario.get(), &raw);
  ResultPtr result(raw);
  if (!result) return report(run_status);
  const std::string abort_message = pfc_last_error();

  // Outputs are written even for an aborted run; the trace ends at the abort.
  if (pfc_status st = pfc_result_write_outputs(result.get()); st != PFC_OK) return report(st);
  if (!quiet) pfc_result_write_report(result.get(), "-");
  if (print_metrics) pfc_result_write_metrics(result.get(), "-");
  if (run_status != PFC_OK) {
    std::fprintf(stderr, "pfcsim: %s: %s\n", pfc_status_name(run_status), abort_message.c_str());
  }
  return exit_code(run_status);
}

int cmd_sweep(const ScenarioOptions& so, const std::vector<std::string>& axes,
              const std::string& grid_file, unsigned threads, const std::string& out_dir) {
  ScenarioPtr scenario;
  if (pfc_status st = so.build(scenario); st != PFC_OK) return report(st);
  std::vector<const char*> axis_ptrs;
  for (const std::string& a : axes) axis_ptrs.push_back(a.c_str());
  size_t points = 0;
  const pfc_status st = pfc_sweep_run(
      scenario.get(), axis_ptrs.data(), axis_ptrs.size(),
      grid_file.empty() ? nullptr : grid_file.c_str(), threads,
      out_dir.empty() ? nullptr : out_dir.c_str(),
      [](size_t index, const char* status, const char* settings, void*) {
        std::printf("%4zu  %-24s %s\n", index, status, settings);
      },
      nullptr, &points);
  if (st == PFC_OK) std::printf("%zu scenarios completed\n", points);
  return report(st);
}

int cmd_check(const std::vector<int>& ids, std::uint64_t seed) {
  size_t failed = 0;
  const pfc_status st = pfc_check_run(
      ids.empty() ? nullptr : ids.data(), ids.size(), seed,
      [](int, int, const char* line, void*) {
        std::printf("%s\n", line);
        std::fflush(stdout);
      },
      nullptr, &failed);
  if (st == PFC_OK) std::printf("all acceptance criteria passed\n");
  return report(st);
}

int cmd_oracle(const ScenarioOptions& so, double delta_rho, std::optional<double> I_s) {
  ScenarioPtr scenario;
  if (pfc_status st = so.build(scenario); st != PFC_OK) return report(st);
  double current = 0.0;
  if (I_s) {
    current = *I_s;
  } else if (pfc_status st = pfc_required_current(scenario.get(), delta_rho, &current);
             st != PFC_OK) {
    return report(st);
  }
  return report(pfc_oracle_write(scenario.get(), delta_rho, current, "-"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensorless PFC boost rectifier simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pfc_version()));

  auto* run = app.add_subcommand("run", "simulate one scenario");
  ScenarioOptions run_opts;
  run_opts.attach(run);
  bool quiet = false, print_metrics = false;
  run->add_flag("-q,--quiet", quiet, "do not print the report");
  run->add_flag("--print-metrics", print_metrics, "print the key-value metrics to stdout");

  auto* sweep = app.add_subcommand("sweep", "run a grid of scenarios in parallel");
  ScenarioOptions sweep_opts;
  sweep_opts.attach(sweep);
  std::vector<std::string> axes;
  std::string grid_file, out_dir;
  unsigned threads = 0;
  sweep->add_option("-g,--grid", axes, "axis as key=v1,v2,... (repeatable)");
  sweep->add_option("--grid-file", grid_file, "file with one 'key = v1, v2' axis per line")
      ->check(CLI::ExistingFile);
  sweep->add_option("-j,--threads", threads, "worker threads (default: all cores)");
  sweep->add_option("-o,--out", out_dir, "output directory for per-scenario files");

  auto* check = app.add_subcommand("check", "run the acceptance suite");
  std::vector<int> ids;
  std::uint64_t seed = 20240611;
  check->add_option("-n,--criterion", ids, "run only these criteria (repeatable)")
      ->check(CLI::Range(1, 8));
  check->add_option("--seed", seed, "seed for the randomized identity checks");

  auto* oracle = app.add_subcommand("oracle", "print steady-state predictions");
  ScenarioOptions oracle_opts;
  oracle_opts.attach(oracle);
  double delta_rho = 0.0;
  std::optional<double> I_s;
  oracle->add_option("--delta-rho", delta_rho, "current phase lag, rad");
  oracle->add_option("--I-s", I_s, "current amplitude, A (default: amplitude giving V_d)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed()) return cmd_run(run_opts, quiet, print_metrics);
  if (sweep->parsed()) return cmd_sweep(sweep_opts, axes, grid_file, threads, out_dir);
  if (check->parsed()) return cmd_check(ids, seed);
  return cmd_oracle(oracle_opts, delta_rho, I_s);
}
