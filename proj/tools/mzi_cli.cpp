// Command-line front end. Talks to the simulator only through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mzi/mzi.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFail = 2;

struct ScenarioDeleter {
  void operator()(mzi_scenario* s) const { mzi_scenario_free(s); }
};
struct ReportDeleter {
  void operator()(mzi_report* r) const { mzi_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { mzi_string_free(s); }
};
using ScenarioPtr = std::unique_ptr<mzi_scenario, ScenarioDeleter>;
using ReportPtr = std::unique_ptr<mzi_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

struct Failure {
  mzi_status status;
  std::string message;
};

void check(mzi_status status) {
  if (status != MZI_OK) throw Failure{status, mzi_last_error()};
}

ScenarioPtr open_scenario(const std::string& source, const std::vector<std::string>& overrides) {
  mzi_scenario* raw = nullptr;
  if (std::filesystem::exists(source))
    check(mzi_scenario_load(source.c_str(), &raw));
  else
    check(mzi_scenario_builtin(source.c_str(), &raw));
  ScenarioPtr s(raw);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw Failure{MZI_INVALID_OVERRIDE, "override must be path=value: " + o};
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(o.substr(eq + 1), &used);
      if (used != o.size() - eq - 1) throw std::invalid_argument(o);
    } catch (const std::exception&) {
      throw Failure{MZI_INVALID_OVERRIDE, "override value is not a number: " + o};
    }
    check(mzi_scenario_set(s.get(), o.substr(0, eq).c_str(), value));
  }
  return s;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Failure{MZI_INVALID_PARAMETER, "bad value in --values: '" + item + "'"};
    }
  }
  return values;
}

int finish(const mzi_report* r, const std::string& out_dir, bool dump_timeseries) {
  if (!out_dir.empty()) check(mzi_report_write(r, out_dir.c_str(), dump_timeseries ? 1 : 0));
  for (size_t i = 0; i < mzi_report_verdict_count(r); ++i) {
    const char* claim = nullptr;
    int pass = 0;
    double measured = 0.0, limit = 0.0;
    check(mzi_report_verdict(r, i, &claim, &pass, &measured, &limit));
    std::printf("%s %-32s measured=%.6g limit=%.6g\n", pass ? "PASS" : "FAIL", claim, measured, limit);
  }
  return mzi_report_all_pass(r) ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested Mach-Zehnder interferometer with vibrating mirrors"};
  app.require_subcommand(1);

  std::string scenario, out_dir, param, values_csv, builtin;
  std::vector<std::string> overrides;
  bool dump_timeseries = false;

  auto* run = app.add_subcommand("run", "Simulate a scenario and evaluate its claims");
  run->add_option("--scenario", scenario, "Config file or built-in name")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--set", overrides, "Override a parameter, path=value");
  run->add_flag("--dump-timeseries", dump_timeseries, "Also write timeseries.csv");

  auto* weak = app.add_subcommand("weak-values", "Print the weak values of a scenario");
  weak->add_option("--scenario", scenario, "Config file or built-in name")->required();
  weak->add_option("--set", overrides, "Override a parameter, path=value");

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and fit a power law");
  sweep->add_option("--scenario", scenario, "Config file or built-in name")->required();
  sweep->add_option("--param", param, "Parameter path, e.g. drives.A.g0");
  sweep->add_option("--values", values_csv, "Comma-separated values");
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--set", overrides, "Override a parameter, path=value");
  sweep->add_flag("--dump-timeseries", dump_timeseries, "Also write timeseries.csv");

  auto* emit = app.add_subcommand("emit", "Print a built-in scenario as a config document");
  emit->add_option("--builtin", builtin, "Built-in name")->required();

  auto* list = app.add_subcommand("list", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*list) {
      for (size_t i = 0; i < mzi_builtin_count(); ++i) std::printf("%s\n", mzi_builtin_name(i));
      return kExitPass;
    }
    if (*emit) {
      mzi_scenario* raw = nullptr;
      check(mzi_scenario_builtin(builtin.c_str(), &raw));
      ScenarioPtr s(raw);
      char* text = nullptr;
      check(mzi_scenario_emit(s.get(), &text));
      StringPtr owned(text);
      std::fputs(text, stdout);
      return kExitPass;
    }

    ScenarioPtr s = open_scenario(scenario, overrides);
    if (*weak) {
      char* text = nullptr;
      check(mzi_weak_values_json(s.get(), &text));
      StringPtr owned(text);
      std::fputs(text, stdout);
      return kExitPass;
    }

    mzi_report* raw = nullptr;
    if (*run) {
      check(mzi_run(s.get(), &raw));
    } else {
      std::vector<double> values;
      if (param.empty()) {
        const char* stored = nullptr;
        const double* stored_values = nullptr;
        size_t count = 0;
        check(mzi_scenario_sweep_spec(s.get(), &stored, &stored_values, &count));
        if (!stored) throw Failure{MZI_INVALID_PARAMETER, "--param is required (scenario has no sweep)"};
        param = stored;
        values.assign(stored_values, stored_values + count);
      } else {
        if (values_csv.empty()) throw Failure{MZI_INVALID_PARAMETER, "--values is required with --param"};
        values = parse_values(values_csv);
      }
      check(mzi_sweep(s.get(), param.c_str(), values.data(), values.size(), &raw));
    }
    ReportPtr report(raw);
    return finish(report.get(), out_dir, dump_timeseries);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error [%s]: %s\n", mzi_status_name(f.status), f.message.c_str());
    return kExitUsage;
  }
}
