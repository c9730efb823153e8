#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "mzi/error.hpp"
#include "mzi/scenario.hpp"
#include "mzi/state.hpp"

namespace mzi {

using nlohmann::json;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

json pair_json(Amp a) { return json::array({a.real(), a.imag()}); }

json weak_values_object(const std::optional<std::array<Amp, 5>>& w) {
  if (!w) return nullptr;
  json out = json::object();
  for (Mirror m : kAllMirrors) out[std::string(1, mirror_label(m))] = pair_json((*w)[index(m)]);
  return out;
}

// JSON has no infinity; clamp so the report always parses.
double finite(double v) {
  if (std::isnan(v)) return 0.0;
  if (std::isinf(v)) return v > 0 ? 1e308 : -1e308;
  return v;
}

}  // namespace

void write_spectrum_csv(const RunReport& report, std::ostream& os) {
  os << "freq_cycles,q_power,p_power\n";
  for (const auto& b : report.spectrum.bins)
    os << b.freq << ',' << g17(b.q_power) << ',' << g17(b.p_power) << '\n';
}

void write_timeseries_csv(const RunReport& report, std::ostream& os) {
  const auto& ts = report.timeseries;
  os << "t,q,p\n";
  for (int k = 0; k < ts.n_samples; ++k)
    os << g17(ts.t(k)) << ',' << g17(ts.q[k]) << ',' << g17(ts.p[k]) << '\n';
}

std::vector<SpectrumBin> read_spectrum_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "freq_cycles,q_power,p_power")
    throw Error(ErrorCode::IoError, "spectrum.csv: bad header");
  std::vector<SpectrumBin> bins;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    SpectrumBin b;
    const char* pos = line.data();
    const char* end = line.data() + line.size();
    auto field = [&](auto& out, bool last) {
      const auto [ptr, ec] = std::from_chars(pos, end, out);
      const bool ok = ec == std::errc{} && (last ? ptr == end : ptr != end && *ptr == ',');
      if (!ok)
        throw Error(ErrorCode::IoError, "spectrum.csv: bad row '" + line + "'");
      pos = last ? ptr : ptr + 1;
    };
    field(b.freq, false);
    field(b.q_power, false);
    field(b.p_power, true);
    bins.push_back(b);
  }
  return bins;
}

std::string report_json(const RunReport& r) {
  json peaks = json::array();
  for (const auto& p : r.spectrum.peaks)
    peaks.push_back({{"freq", p.freq}, {"magnitude", p.magnitude}, {"above_threshold", p.above_threshold}});
  json slopes = json::array();
  for (const auto& s : r.spectrum.slopes)
    slopes.push_back({{"param", s.param}, {"exponent", finite(s.exponent)}, {"residual", finite(s.residual)}});
  json verdicts = json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back(
        {{"claim", v.claim}, {"pass", v.pass}, {"measured", finite(v.measured)}, {"limit", finite(v.limit)}});
  json doc{{"scenario", r.scenario},
           {"weak_values", weak_values_object(r.weak_values)},
           {"dark_port_residual", r.dark_port_residual},
           {"peaks", peaks},
           {"slopes", slopes},
           {"verdicts", verdicts}};
  if (!r.sweep_points.empty()) {
    json points = json::array();
    for (const auto& p : r.sweep_points) points.push_back({{"value", p.value}, {"observable", p.observable}});
    doc["sweep_points"] = points;
  }
  return doc.dump(2) + "\n";
}

std::string weak_values_json(const Scenario& scenario) {
  const NetworkSpec net = validate_scenario(scenario);
  const PathState fwd = forward_state(net);
  const PathState bwd = backward_state(net);
  std::optional<std::array<Amp, 5>> w;
  json joint = nullptr;
  if (std::abs(fwd.overlap) > kSingularOverlap) {
    w.emplace();
    for (Mirror m : kAllMirrors) (*w)[index(m)] = weak_value(fwd, bwd, m);
    joint = json{{"AB", pair_json(joint_weak_value(net, Mirror::A, Mirror::B))}};
  }
  json doc{{"scenario", scenario.name},
           {"weak_values", weak_values_object(w)},
           {"joint_weak_values", joint},
           {"overlap", pair_json(fwd.overlap)},
           {"dark_port_residual", net.dark_port_residual}};
  return doc.dump(2) + "\n";
}

void write_report_files(const RunReport& report, const std::filesystem::path& dir, bool dump_timeseries) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  auto write = [&](const char* name, auto&& body) {
    std::ofstream os(dir / name);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
    body(os);
    if (!os) throw Error(ErrorCode::IoError, "write failed: " + (dir / name).string());
  };
  write("spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(report, os); });
  write("report.json", [&](std::ostream& os) { os << report_json(report); });
  if (dump_timeseries) write("timeseries.csv", [&](std::ostream& os) { write_timeseries_csv(report, os); });
}

}  // namespace mzi
