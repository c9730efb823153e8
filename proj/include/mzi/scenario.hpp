#pragma once

// Built-in scenarios, the config document, and the experiment runners.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mzi/field.hpp"
#include "mzi/optics.hpp"
#include "mzi/spectra.hpp"

namespace mzi {

struct SamplingConfig {
  int n_samples = 4096;
  double peak_factor = 1e6;
  double noise_floor = 1e-18;
  double noise_sigma = 0.0;  // additive noise hook; 0 disables it
  std::uint64_t noise_seed = 0;

  bool operator==(const SamplingConfig&) const = default;
};

struct SweepSpec {
  std::string param;
  std::vector<double> values;

  bool operator==(const SweepSpec&) const = default;
};

struct Scenario {
  std::string name;
  NetworkParams network;
  Grid grid;
  SamplingConfig sampling;
  std::optional<SweepSpec> sweep;

  bool operator==(const Scenario&) const = default;
};

inline constexpr std::array<std::string_view, 3> kBuiltinScenarios{"danan-original", "antiphase-ab",
                                                                   "blocked-lower"};

struct Override {
  std::string param;
  double value = 0.0;
};

/// Throws UnknownScenario for an unrecognised name and InvalidOverride when an
/// override names a bad path or leaves the scenario invalid.
Scenario build_scenario(std::string_view name, std::span<const Override> overrides = {});

/// Parameter paths:
///   network.{outer_T,inner_T1,inner_T2,inner_phase,outer_phase,leak_eps,block_c}
///   drives.<E|A|B|C|F>.{g0,freq,phase,lever}
///   g0                                   (every drive)
///   grid.{n_points,half_width}
///   sampling.{n_samples,peak_factor,noise_floor,noise_sigma,noise_seed}
/// Throws InvalidParamPath for an unknown path or undriven mirror.
void set_param(Scenario& scenario, std::string_view path, double value);
double get_param(const Scenario& scenario, std::string_view path);

/// Builds the network and checks grid and sampling; returns the network.
NetworkSpec validate_scenario(const Scenario& scenario);

/// Strict JSON: unknown keys and type mismatches throw ConfigError.
Scenario parse_scenario(std::string_view json_text);
std::string emit_scenario(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

struct Verdict {
  std::string claim;
  bool pass = false;
  double measured = 0.0;
  double limit = 0.0;
};

struct SweepPoint {
  double value = 0.0;
  double observable = 0.0;
};

struct RunReport {
  std::string scenario;
  std::optional<std::array<Amp, 5>> weak_values;
  double dark_port_residual = 0.0;
  SpectrumReport spectrum;
  std::vector<Verdict> verdicts;
  TimeSeries timeseries;
  std::vector<SweepPoint> sweep_points;

  bool all_pass() const;
  const Verdict* verdict(std::string_view claim) const;
};

/// Runs every engine on the scenario and evaluates the claims that apply to
/// it. Deterministic for a given scenario.
RunReport run(const Scenario& scenario);

/// Runs the scenario, then re-runs it for each value of `param` and fits the
/// power-law exponent of the swept observable:
///   drives.<M>.g0    tone amplitude of q at that drive's frequency
///   network.leak_eps |mean detected power - its value at leak_eps = 0|
RunReport sweep(const Scenario& scenario, std::string_view param, std::span<const double> values);

// Report files.
void write_spectrum_csv(const RunReport& report, std::ostream& os);
void write_timeseries_csv(const RunReport& report, std::ostream& os);
std::vector<SpectrumBin> read_spectrum_csv(std::istream& is);
std::string report_json(const RunReport& report);
std::string weak_values_json(const Scenario& scenario);
void write_report_files(const RunReport& report, const std::filesystem::path& dir,
                        bool dump_timeseries);

}  // namespace mzi
