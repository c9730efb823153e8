#include "mzi/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mzi/analytic.hpp"
#include "mzi/error.hpp"
#include "mzi/state.hpp"

namespace mzi {

using nlohmann::json;

namespace {

constexpr double kWeakValueTol = 1e-12;
constexpr double kDarkPortTol = 1e-12;
constexpr double kQuietFactor = 1e-4;  // 40 dB
constexpr double kAgreementSlope = 5.0;
constexpr double kAgreementFloor = 1e-9;
constexpr double kAgreementMaxG0 = 1e-3;
constexpr double kParsevalTol = 1e-9;

std::vector<MirrorDrive> danan_drives() {
  return {{Mirror::A, 30, 1e-3, 0.0, 1.0},
          {Mirror::B, 32, 1e-3, 0.0, 1.0},
          {Mirror::C, 34, 1e-3, 0.0, 1.0},
          {Mirror::E, 36, 1e-3, 0.0, 1.0},
          {Mirror::F, 38, 1e-3, 0.0, 1.0}};
}

Scenario builtin(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  if (name == "danan-original") {
    s.network.drives = danan_drives();
  } else if (name == "antiphase-ab") {
    // Mirror C keeps its own frequency as an in-band positive control.
    s.network.drives = {{Mirror::A, 30, 1e-3, 0.0, 1.0},
                        {Mirror::B, 30, 1e-3, std::numbers::pi, 1.0},
                        {Mirror::C, 34, 1e-3, 0.0, 1.0}};
  } else if (name == "blocked-lower") {
    s.network.block_c = true;
    s.network.drives = danan_drives();
  } else {
    throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + std::string(name) + "'");
  }
  return s;
}

[[noreturn]] void bad_path(std::string_view path, const std::string& why) {
  throw Error(ErrorCode::InvalidParamPath, "parameter '" + std::string(path) + "': " + why);
}

int as_int(std::string_view path, double value) {
  if (!std::isfinite(value) || value != std::round(value) || std::abs(value) > 1e9)
    throw Error(ErrorCode::InvalidParameter,
                "parameter '" + std::string(path) + "' must be an integer");
  return static_cast<int>(value);
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    parts.push_back(path.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

MirrorDrive& find_drive(Scenario& s, std::string_view path, std::string_view label) {
  const auto m = parse_mirror(label);
  if (!m) bad_path(path, "unknown mirror");
  for (auto& d : s.network.drives)
    if (d.mirror == *m) return d;
  bad_path(path, "mirror is not driven in this scenario");
}

// Shared accessor so get and set accept exactly the same paths.
template <class Visitor>
void visit_param(Scenario& s, std::string_view path, Visitor&& visit) {
  const auto parts = split_path(path);
  if (parts.size() == 1 && parts[0] == "g0") {
    if (s.network.drives.empty()) bad_path(path, "scenario has no drives");
    for (auto& d : s.network.drives) visit(d.g0);
    return;
  }
  if (parts.size() == 2 && parts[0] == "network") {
    auto& n = s.network;
    if (parts[1] == "outer_T") return visit(n.outer_T);
    if (parts[1] == "inner_T1") return visit(n.inner_T1);
    if (parts[1] == "inner_T2") return visit(n.inner_T2);
    if (parts[1] == "inner_phase") return visit(n.inner_phase);
    if (parts[1] == "outer_phase") return visit(n.outer_phase);
    if (parts[1] == "leak_eps") return visit(n.leak_eps);
    if (parts[1] == "block_c") return visit(n.block_c);
  }
  if (parts.size() == 3 && parts[0] == "drives") {
    auto& d = find_drive(s, path, parts[1]);
    if (parts[2] == "g0") return visit(d.g0);
    if (parts[2] == "freq") return visit(d.freq);
    if (parts[2] == "phase") return visit(d.phase);
    if (parts[2] == "lever") return visit(d.lever);
  }
  if (parts.size() == 2 && parts[0] == "grid") {
    if (parts[1] == "n_points") return visit(s.grid.n_points);
    if (parts[1] == "half_width") return visit(s.grid.half_width);
  }
  if (parts.size() == 2 && parts[0] == "sampling") {
    auto& c = s.sampling;
    if (parts[1] == "n_samples") return visit(c.n_samples);
    if (parts[1] == "peak_factor") return visit(c.peak_factor);
    if (parts[1] == "noise_floor") return visit(c.noise_floor);
    if (parts[1] == "noise_sigma") return visit(c.noise_sigma);
    if (parts[1] == "noise_seed") return visit(c.noise_seed);
  }
  bad_path(path, "not a scalar parameter");
}

}  // namespace

void set_param(Scenario& scenario, std::string_view path, double value) {
  visit_param(scenario, path, [&](auto& field) {
    using T = std::remove_reference_t<decltype(field)>;
    if constexpr (std::is_same_v<T, bool>) {
      if (value != 0.0 && value != 1.0)
        throw Error(ErrorCode::InvalidParameter, std::string(path) + " must be 0 or 1");
      field = value != 0.0;
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      const int v = as_int(path, value);
      if (v < 0) throw Error(ErrorCode::InvalidParameter, std::string(path) + " must be >= 0");
      field = static_cast<std::uint64_t>(v);
    } else if constexpr (std::is_integral_v<T>) {
      field = as_int(path, value);
    } else {
      if (!std::isfinite(value))
        throw Error(ErrorCode::InvalidParameter, std::string(path) + " must be finite");
      field = value;
    }
  });
}

double get_param(const Scenario& scenario, std::string_view path) {
  Scenario copy = scenario;
  double out = 0.0;
  visit_param(copy, path, [&](auto& field) { out = static_cast<double>(field); });
  return out;
}

NetworkSpec validate_scenario(const Scenario& s) {
  s.grid.validate();
  const int n = s.sampling.n_samples;
  if (n < 16 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw Error(ErrorCode::InvalidParameter, "sampling.n_samples must be a power of two >= 16");
  if (!(s.sampling.peak_factor > 0.0) || !(s.sampling.noise_floor >= 0.0) ||
      !(s.sampling.noise_sigma >= 0.0))
    throw Error(ErrorCode::InvalidParameter, "sampling thresholds must be non-negative");
  return build_network(s.network, n);
}

Scenario build_scenario(std::string_view name, std::span<const Override> overrides) {
  Scenario s = builtin(name);
  try {
    for (const auto& o : overrides) set_param(s, o.param, o.value);
    validate_scenario(s);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidOverride, std::string("invalid override: ") + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Config document

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, "config: " + what);
}

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_error(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      config_error("unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) config_error(std::string(where) + "." + key + " must be a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) config_error(std::string(where) + "." + key + " must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) config_error(std::string(where) + "." + key + " must be an integer");
    out = v.get<T>();
  } else {
    if (!v.is_number()) config_error(std::string(where) + "." + key + " must be a number");
    out = v.get<double>();
  }
}

json drive_json(const MirrorDrive& d) {
  return json{{"mirror", std::string(1, mirror_label(d.mirror))},
              {"freq", d.freq},
              {"g0", d.g0},
              {"phase", d.phase},
              {"lever", d.lever}};
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  check_keys(doc, "document", {"name", "network", "drives", "grid", "sampling", "sweep"});
  if (!doc.contains("name")) config_error("missing 'name'");

  Scenario s;
  read(doc, "name", s.name, "document");
  if (doc.contains("network")) {
    const json& n = doc["network"];
    check_keys(n, "network",
               {"outer_T", "inner_T1", "inner_T2", "inner_phase", "outer_phase", "block_c", "leak_eps"});
    read(n, "outer_T", s.network.outer_T, "network");
    read(n, "inner_T1", s.network.inner_T1, "network");
    read(n, "inner_T2", s.network.inner_T2, "network");
    read(n, "inner_phase", s.network.inner_phase, "network");
    read(n, "outer_phase", s.network.outer_phase, "network");
    read(n, "block_c", s.network.block_c, "network");
    read(n, "leak_eps", s.network.leak_eps, "network");
  }
  if (doc.contains("drives")) {
    const json& drives = doc["drives"];
    if (!drives.is_array()) config_error("drives must be an array");
    for (const json& d : drives) {
      check_keys(d, "drive", {"mirror", "freq", "g0", "phase", "lever"});
      std::string label;
      read(d, "mirror", label, "drive");
      const auto m = parse_mirror(label);
      if (!m) config_error("drive mirror '" + label + "' is not one of E, A, B, C, F");
      MirrorDrive drive;
      drive.mirror = *m;
      read(d, "freq", drive.freq, "drive");
      read(d, "g0", drive.g0, "drive");
      read(d, "phase", drive.phase, "drive");
      read(d, "lever", drive.lever, "drive");
      s.network.drives.push_back(drive);
    }
  }
  if (doc.contains("grid")) {
    check_keys(doc["grid"], "grid", {"n_points", "half_width"});
    read(doc["grid"], "n_points", s.grid.n_points, "grid");
    read(doc["grid"], "half_width", s.grid.half_width, "grid");
  }
  if (doc.contains("sampling")) {
    const json& c = doc["sampling"];
    check_keys(c, "sampling", {"n_samples", "peak_factor", "noise_floor", "noise_sigma", "noise_seed"});
    read(c, "n_samples", s.sampling.n_samples, "sampling");
    read(c, "peak_factor", s.sampling.peak_factor, "sampling");
    read(c, "noise_floor", s.sampling.noise_floor, "sampling");
    read(c, "noise_sigma", s.sampling.noise_sigma, "sampling");
    read(c, "noise_seed", s.sampling.noise_seed, "sampling");
  }
  if (doc.contains("sweep") && !doc["sweep"].is_null()) {
    const json& w = doc["sweep"];
    check_keys(w, "sweep", {"param", "values"});
    SweepSpec sweep;
    read(w, "param", sweep.param, "sweep");
    if (!w.contains("values") || !w["values"].is_array()) config_error("sweep.values must be an array");
    for (const json& v : w["values"]) {
      if (!v.is_number()) config_error("sweep.values must be numbers");
      sweep.values.push_back(v.get<double>());
    }
    s.sweep = sweep;
  }

  try {
    validate_scenario(s);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return s;
}

std::string emit_scenario(const Scenario& s) {
  json drives = json::array();
  for (const auto& d : s.network.drives) drives.push_back(drive_json(d));
  json doc{{"name", s.name},
           {"network",
            {{"outer_T", s.network.outer_T},
             {"inner_T1", s.network.inner_T1},
             {"inner_T2", s.network.inner_T2},
             {"inner_phase", s.network.inner_phase},
             {"outer_phase", s.network.outer_phase},
             {"block_c", s.network.block_c},
             {"leak_eps", s.network.leak_eps}}},
           {"drives", drives},
           {"grid", {{"n_points", s.grid.n_points}, {"half_width", s.grid.half_width}}},
           {"sampling",
            {{"n_samples", s.sampling.n_samples},
             {"peak_factor", s.sampling.peak_factor},
             {"noise_floor", s.sampling.noise_floor},
             {"noise_sigma", s.sampling.noise_sigma},
             {"noise_seed", s.sampling.noise_seed}}},
           {"sweep", nullptr}};
  if (s.sweep) doc["sweep"] = json{{"param", s.sweep->param}, {"values", s.sweep->values}};
  return doc.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------
// Runners

bool RunReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const Verdict* RunReport::verdict(std::string_view claim) const {
  for (const auto& v : verdicts)
    if (v.claim == claim) return &v;
  return nullptr;
}

namespace {

double decibels(double ratio) { return 10.0 * std::log10(std::max(ratio, 1e-300)); }

bool is_comment_network(const NetworkParams& n) {
  const NetworkParams ref;
  return n.outer_T == ref.outer_T && n.inner_T1 == ref.inner_T1 && n.inner_T2 == ref.inner_T2 &&
         n.inner_phase == ref.inner_phase && n.outer_phase == ref.outer_phase &&
         n.leak_eps == 0.0 && !n.block_c;
}

bool antiphase_pair(const NetworkParams& n) {
  const MirrorDrive* a = n.drive(Mirror::A);
  const MirrorDrive* b = n.drive(Mirror::B);
  if (!a || !b || a->freq != b->freq || a->g0 != b->g0 || a->lever != b->lever) return false;
  return std::abs(std::remainder(b->phase - a->phase - std::numbers::pi, 2.0 * std::numbers::pi)) <= 1e-12;
}

std::string drive_group_label(const std::vector<const MirrorDrive*>& group) {
  std::string label;
  for (const auto* d : group) {
    if (!label.empty()) label += '+';
    label += mirror_label(d->mirror);
  }
  return label + "@" + std::to_string(group.front()->freq);
}

// First-order tone amplitude at a frequency shared by `group`.
double predicted_line(const FirstOrderModel& model, const std::vector<const MirrorDrive*>& group) {
  Amp phasor{};
  for (const auto* d : group) {
    const double coeff = model.kappa * model.weighted_weak_values[index(d->mirror)].real() *
                         model.orientation[index(d->mirror)] * d->lever * d->g0;
    phasor += std::polar(coeff, d->phase);
  }
  return std::abs(phasor);
}

TimeSeries timeseries_for(const Scenario& s, const NetworkSpec& net) {
  return run_timeseries(net, s.grid, s.sampling.n_samples,
                        NoiseHook{s.sampling.noise_sigma, s.sampling.noise_seed});
}

void add(RunReport& r, std::string claim, bool pass, double measured, double limit) {
  r.verdicts.push_back({std::move(claim), pass, measured, limit});
}

}  // namespace

RunReport run(const Scenario& s) {
  const NetworkSpec net = validate_scenario(s);
  const PeakCriterion criterion{s.sampling.peak_factor, s.sampling.noise_floor};

  RunReport r;
  r.scenario = s.name;
  r.dark_port_residual = net.dark_port_residual;

  const PathState fwd = forward_state(net);
  const PathState bwd = backward_state(net);
  const bool singular = std::abs(fwd.overlap) <= kSingularOverlap;
  if (!singular) {
    std::array<Amp, 5> w{};
    for (Mirror m : kAllMirrors) w[index(m)] = weak_value(fwd, bwd, m);
    r.weak_values = w;
  }

  r.timeseries = timeseries_for(s, net);
  r.spectrum = power_spectrum(r.timeseries);

  // Drives grouped by frequency, in ascending frequency order.
  std::map<int, std::vector<const MirrorDrive*>> groups;
  for (const auto& d : net.params.drives) groups[d.freq].push_back(&d);
  std::vector<int> freqs;
  for (const auto& [f, _] : groups) freqs.push_back(f);
  mark_peaks(r.spectrum, freqs, criterion);
  const double threshold = r.spectrum.threshold;

  if (is_comment_network(net.params)) {
    const auto& w = *r.weak_values;
    const double dev = std::max({std::abs(w[index(Mirror::A)] - 1.0), std::abs(w[index(Mirror::B)] + 1.0),
                                 std::abs(w[index(Mirror::C)] - 1.0),
                                 std::abs(joint_weak_value(net, Mirror::A, Mirror::B))});
    add(r, "weak-values", dev <= kWeakValueTol, dev, kWeakValueTol);
  }
  if (r.weak_values) {
    const auto& w = *r.weak_values;
    const double dev = std::abs(w[index(Mirror::A)] + w[index(Mirror::B)] + w[index(Mirror::C)] - 1.0);
    add(r, "weak-value-sum-rule", dev <= kWeakValueTol, dev, kWeakValueTol);
  }
  if (net.params.leak_eps == 0.0)
    add(r, "dark-port-static", net.dark_port_residual <= kDarkPortTol, net.dark_port_residual, kDarkPortTol);

  if (antiphase_pair(net.params)) {
    const double worst = std::sqrt(*std::max_element(r.timeseries.dark.begin(), r.timeseries.dark.end()));
    add(r, "dark-port-preserved", worst <= kDarkPortTol, worst, kDarkPortTol);
  }

  const FirstOrderModel model = first_order_model(net);
  bool any_expected_peak = false;
  for (const auto& [f, group] : groups) {
    const double amp = predicted_line(model, group);
    const double predicted_power = 0.5 * amp * amp;
    const double measured = r.spectrum.bins[f].q_power;
    const std::string label = drive_group_label(group);
    if (predicted_power > threshold) {
      any_expected_peak = true;
      add(r, "peak:" + label, measured > threshold, decibels(measured / threshold), 0.0);
    } else if (predicted_power <= kQuietFactor * threshold) {
      add(r, "quiet:" + label, measured <= kQuietFactor * threshold, decibels(measured / threshold),
          decibels(kQuietFactor));
    } else {
      add(r, "below-threshold:" + label, measured <= threshold, decibels(measured / threshold), 0.0);
    }

    if (group.size() > 1) {
      // Reference: only the first drive of the group keeps its amplitude.
      Scenario ref = s;
      for (auto& d : ref.network.drives)
        if (d.freq == f && d.mirror != group.front()->mirror) d.g0 = 0.0;
      const NetworkSpec ref_net = validate_scenario(ref);
      const auto ref_ts = timeseries_for(ref, ref_net);
      const double ref_power = power_spectrum(ref_ts).bins[f].q_power;
      add(r, "suppressed:" + label, measured <= kQuietFactor * ref_power, decibels(ref_power / measured),
          -decibels(kQuietFactor));
    }
  }
  if (!any_expected_peak) {
    const int count = count_peaks(r.spectrum);
    add(r, "quiet-spectrum", count == 0, count, 0.0);
  }

  double max_g0 = 0.0;
  for (const auto& d : net.params.drives) max_g0 = std::max(max_g0, d.g0);
  if (s.sampling.noise_sigma == 0.0 && max_g0 <= kAgreementMaxG0) {
    double max_diff = 0.0, max_pred = 0.0;
    for (int k = 0; k < r.timeseries.n_samples; ++k) {
      const double pred = predict_detector_q(model, r.timeseries.t(k));
      max_diff = std::max(max_diff, std::abs(r.timeseries.q[k] - pred));
      max_pred = std::max(max_pred, std::abs(pred));
    }
    const double bound = kAgreementSlope * max_g0 * max_pred + kAgreementFloor;
    add(r, "backend-agreement", max_diff <= bound, max_diff, bound);
  }

  double spectral = 0.0, mean_square = 0.0;
  for (const auto& b : r.spectrum.bins) spectral += b.q_power;
  for (double q : r.timeseries.q) mean_square += q * q;
  mean_square /= r.timeseries.n_samples;
  const double parseval = std::abs(spectral - mean_square);
  add(r, "parseval", parseval <= kParsevalTol * mean_square + 1e-300, parseval,
      kParsevalTol * mean_square);
  return r;
}

RunReport sweep(const Scenario& s, std::string_view param, std::span<const double> values) {
  const auto parts = split_path(param);
  const bool is_g0 = parts.size() == 3 && parts[0] == "drives" && parts[2] == "g0";
  const bool is_leak = param == "network.leak_eps";
  if (!is_g0 && !is_leak)
    bad_path(param, "sweeps support drives.<M>.g0 and network.leak_eps");
  for (double v : values)
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidParameter, "sweep values must be positive");

  int freq = 0;
  if (is_g0) {
    Scenario probe = s;
    freq = static_cast<int>(get_param(probe, std::string(parts[0]) + "." + std::string(parts[1]) + ".freq"));
  }

  RunReport r = run(s);

  auto mean_power = [](const TimeSeries& ts) {
    double acc = 0.0;
    for (double p : ts.p) acc += p;
    return acc / ts.n_samples;
  };
  double baseline = 0.0;
  if (is_leak) {
    Scenario zero = s;
    set_param(zero, param, 0.0);
    baseline = mean_power(timeseries_for(zero, validate_scenario(zero)));
  }

  std::vector<std::pair<double, double>> points;
  for (double v : values) {
    Scenario point = s;
    set_param(point, param, v);
    const auto ts = timeseries_for(point, validate_scenario(point));
    const double observable =
        is_g0 ? 2.0 * single_bin(ts, freq) / ts.n_samples : std::abs(mean_power(ts) - baseline);
    r.sweep_points.push_back({v, observable});
    points.emplace_back(v, observable);
  }

  const PowerLawFit fit = fit_slope(points);
  r.spectrum.slopes.push_back({std::string(param), fit.exponent, fit.residual});

  // Blocked lower arm: the detected signal is second order in the leak;
  // otherwise it interferes with the C arm and is first order.
  const double expected = s.network.block_c ? 2.0 : 1.0;
  const double tol = (is_leak && s.network.block_c) ? 0.01 : 0.1;
  add(r, "scaling:" + std::string(param), std::abs(fit.exponent - expected) <= tol, fit.exponent, expected);
  return r;
}

}  // namespace mzi
