#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ngsim/errors.hpp"
#include "ngsim/experiment.hpp"
#include "ngsim/format.hpp"

namespace ngsim {

const char* to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::rgg: return "rgg";
    case TopologyKind::sw_rgg: return "sw_rgg";
    case TopologyKind::lattice2d: return "lattice2d";
    case TopologyKind::complete: return "complete";
  }
  return "?";
}

const char* to_string(ConnectivityPolicy c) {
  return c == ConnectivityPolicy::regenerate ? "regenerate" : "giant_component";
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::none: return "none";
    case SweepAxis::n: return "n";
    case SweepAxis::p: return "p";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const ParameterError&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || end != value.data() + value.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

FitWindow to_window(const std::string& key, const std::string& value) {
  auto v = to_list(key, value);
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(key + ": expected 'lo,hi' with lo < hi");
  return {v[0], v[1]};
}

}  // namespace

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key), value = trim(raw_value);
  auto& t = topology;
  if (key == "topology.kind") {
    if (value == "rgg") t.kind = TopologyKind::rgg;
    else if (value == "sw_rgg") t.kind = TopologyKind::sw_rgg;
    else if (value == "lattice2d") t.kind = TopologyKind::lattice2d;
    else if (value == "complete") t.kind = TopologyKind::complete;
    else throw ConfigError("topology.kind: unknown topology '" + value + "'");
  } else if (key == "topology.n") {
    t.n = to_unsigned(key, value);
  } else if (key == "topology.k") {
    t.avg_degree = to_double(key, value);
    t.radius.reset();
  } else if (key == "topology.radius") {
    t.radius = to_double(key, value);
    t.avg_degree.reset();
  } else if (key == "topology.L") {
    if (value == "-") t.box_length.reset();
    else t.box_length = to_double(key, value);
  } else if (key == "topology.rho") {
    t.density = to_double(key, value);
    t.box_length.reset();
  } else if (key == "topology.boundary") {
    try {
      t.boundary = parse_boundary(value);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("topology.boundary: ") + e.what());
    }
  } else if (key == "topology.p") {
    t.shortcut_density = to_double(key, value);
  } else if (key == "topology.periodic") {
    t.periodic = to_bool(key, value);
  } else if (key == "topology.connectivity") {
    if (value == "regenerate") t.connectivity = ConnectivityPolicy::regenerate;
    else if (value == "giant_component") t.connectivity = ConnectivityPolicy::giant_component;
    else throw ConfigError("topology.connectivity: unknown policy '" + value + "'");
  } else if (key == "dynamics.mode") {
    try {
      mode = parse_mode(value);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("dynamics.mode: ") + e.what());
    }
  } else if (key == "run.runs") {
    runs = to_unsigned(key, value);
  } else if (key == "run.max_time") {
    max_time = to_double(key, value);
  } else if (key == "run.seed") {
    master_seed = to_unsigned(key, value);
  } else if (key == "run.workers") {
    workers = to_unsigned(key, value);
  } else if (key == "schedule.spacing") {
    if (value == "log" || value == "logarithmic") spacing = Spacing::logarithmic;
    else if (value == "linear") spacing = Spacing::linear;
    else throw ConfigError("schedule.spacing: expected log or linear");
  } else if (key == "schedule.t_min") {
    t_min = to_double(key, value);
  } else if (key == "schedule.points_per_decade") {
    points_per_decade = static_cast<int>(to_unsigned(key, value));
  } else if (key == "schedule.dt") {
    linear_dt = to_double(key, value);
  } else if (key == "snapshot.times") {
    snapshot_times = to_list(key, value);
  } else if (key == "fit.nw") {
    fit_nw = to_window(key, value);
  } else if (key == "fit.nd") {
    fit_nd = to_window(key, value);
  } else if (key == "fit.s") {
    fit_s = to_window(key, value);
  } else if (key == "fit.tc") {
    fit_tc = to_window(key, value);
  } else if (key == "sweep.axis") {
    if (value == "none") sweep_axis = SweepAxis::none;
    else if (value == "n") sweep_axis = SweepAxis::n;
    else if (value == "p") sweep_axis = SweepAxis::p;
    else throw ConfigError("sweep.axis: expected none, n or p");
  } else if (key == "sweep.values") {
    sweep_values = to_list(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void ExperimentConfig::apply_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void ExperimentConfig::validate() const {
  const auto& t = topology;
  if (t.n < 1) throw ConfigError("topology.n must be >= 1");
  if (runs < 1) throw ConfigError("run.runs must be >= 1");
  if (workers < 1) throw ConfigError("run.workers must be >= 1");
  if (!(max_time > 0.0)) throw ConfigError("run.max_time must be positive");
  if (!(t_min > 0.0) || t_min > max_time) throw ConfigError("schedule.t_min must lie in (0, max_time]");
  if (points_per_decade < 1) throw ConfigError("schedule.points_per_decade must be >= 1");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw ConfigError("snapshot.times must be sorted");
  for (double s : snapshot_times)
    if (!(s >= 0.0)) throw ConfigError("snapshot.times must be non-negative");

  switch (t.kind) {
    case TopologyKind::sw_rgg:
      if (!(t.shortcut_density >= 0.0)) throw ConfigError("sw_rgg requires topology.p >= 0");
      [[fallthrough]];
    case TopologyKind::rgg:
      if (t.avg_degree.has_value() == t.radius.has_value())
        throw ConfigError("rgg needs exactly one of topology.k or topology.radius");
      if (t.avg_degree && !(*t.avg_degree > 0.0)) throw ConfigError("topology.k must be positive");
      if (t.radius && !(*t.radius > 0.0)) throw ConfigError("topology.radius must be positive");
      if (t.box_length ? !(*t.box_length > 0.0) : !(t.density > 0.0))
        throw ConfigError("box length / density must be positive");
      break;
    case TopologyKind::lattice2d: {
      const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(t.n))));
      if (side * side != t.n || side < 2)
        throw ConfigError("lattice2d needs topology.n = side^2 with side >= 2");
      break;
    }
    case TopologyKind::complete:
      break;
  }

  if (sweep_axis != SweepAxis::none) {
    if (sweep_values.size() < 3) throw ConfigError("a sweep needs at least 3 values");
    if (sweep_axis == SweepAxis::p && t.kind != TopologyKind::sw_rgg)
      throw ConfigError("p-sweeps need topology.kind=sw_rgg");
    for (double v : sweep_values) {
      if (sweep_axis == SweepAxis::n && !(v >= 1.0 && v == std::floor(v)))
        throw ConfigError("n-sweep values must be positive integers");
      if (sweep_axis == SweepAxis::p && !(v >= 0.0)) throw ConfigError("p-sweep values must be >= 0");
    }
  }
}

SampleSchedule ExperimentConfig::schedule() const {
  if (spacing == Spacing::logarithmic) return SampleSchedule::logarithmic(t_min, max_time, points_per_decade);
  return SampleSchedule::linear(t_min, max_time, linear_dt);
}

double ExperimentConfig::box_length() const {
  if (topology.box_length) return *topology.box_length;
  return std::sqrt(static_cast<double>(topology.n) / topology.density);
}

double ExperimentConfig::target_degree() const {
  const double n = static_cast<double>(topology.n);
  switch (topology.kind) {
    case TopologyKind::rgg:
    case TopologyKind::sw_rgg: {
      if (topology.avg_degree) return *topology.avg_degree;
      const double L = box_length();
      return n / (L * L) * std::numbers::pi * *topology.radius * *topology.radius;
    }
    case TopologyKind::lattice2d: {
      if (topology.periodic) return n == 4 ? 2.0 : 4.0;
      const double side = std::sqrt(n);
      return 4.0 * side * (side - 1.0) / n;
    }
    case TopologyKind::complete:
      return n - 1.0;
  }
  return 0.0;
}

namespace {

// Desk-scale versions of the published experiments; run counts are reduced
// from 1000 realizations.
const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> table = {
      {"fig1",
       "topology.kind=rgg\ntopology.n=1000\ntopology.k=12\ntopology.rho=1\ntopology.boundary=free\n"
       "dynamics.mode=broadcast\nrun.runs=1\nrun.seed=1\nsnapshot.times=1,43,169,291\n"},
      {"fig2",
       "topology.kind=rgg\ntopology.n=1024\ntopology.k=12\ntopology.rho=1\ntopology.boundary=periodic\n"
       "dynamics.mode=broadcast\nrun.runs=200\nrun.seed=2\n"},
      {"fig2-fc",
       "topology.kind=complete\ntopology.n=1024\ndynamics.mode=pairwise\nrun.runs=200\nrun.seed=21\n"},
      {"fig2-lattice",
       "topology.kind=lattice2d\ntopology.n=1024\ntopology.periodic=true\ndynamics.mode=pairwise\n"
       "run.runs=200\nrun.seed=22\n"},
      // The published sizes for this figure are not enumerated; 1024/2048/4096 is an assumption.
      {"fig3",
       "topology.kind=rgg\ntopology.k=50\ntopology.rho=1\ntopology.boundary=periodic\n"
       "dynamics.mode=broadcast\nrun.runs=200\nrun.seed=3\nfit.nw=3,30\nfit.nd=3,30\nfit.s=3,30\n"
       "sweep.axis=n\nsweep.values=1024,2048,4096\n"},
      {"fig4",
       "topology.kind=rgg\ntopology.k=50\ntopology.rho=1\ntopology.boundary=periodic\n"
       "dynamics.mode=broadcast\nrun.runs=200\nrun.seed=4\nsweep.axis=n\nsweep.values=256,512,1024,2048\n"},
      {"fig5",
       "topology.kind=sw_rgg\ntopology.n=2048\ntopology.k=12\ntopology.rho=1\ntopology.boundary=periodic\n"
       "dynamics.mode=broadcast\nrun.runs=200\nrun.seed=5\nsweep.axis=p\n"
       "sweep.values=0.005,0.01,0.02,0.05,0.1\nfit.tc=0.02,0.1\n"},
      {"fig6",
       "topology.kind=sw_rgg\ntopology.p=0.05\ntopology.k=12\ntopology.rho=1\ntopology.boundary=periodic\n"
       "dynamics.mode=broadcast\nrun.runs=200\nrun.seed=6\nsweep.axis=n\nsweep.values=512,1024,2048,4096\n"},
      {"fig6-control",
       "topology.kind=rgg\ntopology.k=12\ntopology.rho=1\ntopology.boundary=periodic\n"
       "dynamics.mode=broadcast\nrun.runs=200\nrun.seed=7\nsweep.axis=n\nsweep.values=512,1024,2048,4096\n"},
      {"fc-pairwise",
       "topology.kind=complete\ndynamics.mode=pairwise\nrun.runs=200\nrun.seed=8\n"
       "sweep.axis=n\nsweep.values=128,256,512,1024,2048\n"},
      {"lattice-pairwise",
       "topology.kind=lattice2d\ntopology.periodic=true\ndynamics.mode=pairwise\nrun.runs=100\nrun.seed=9\n"
       "sweep.axis=n\nsweep.values=256,1024,4096\n"},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : presets()) out.push_back(name);
  return out;
}

const std::string& preset_text(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ConfigError("unknown preset '" + name + "'");
  return it->second;
}

ExperimentConfig load_config(const std::optional<std::string>& preset,
                             const std::optional<std::filesystem::path>& file,
                             const std::vector<std::string>& overrides) {
  ExperimentConfig config;
  if (preset) config.apply_text(preset_text(*preset));
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot read config file " + file->string());
    std::stringstream buf;
    buf << in.rdbuf();
    config.apply_text(buf.str());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    config.set(o.substr(0, eq), o.substr(eq + 1));
  }
  config.validate();
  return config;
}

}  // namespace ngsim
