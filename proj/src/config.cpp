#include "vsq/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "vsq/error.hpp"

namespace vsq {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(std::string_view s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Thrown by value readers; the message lacks the line and key, which the table adds.
struct BadValue {
  std::string message;
};

double need_double(std::string_view v) {
  if (auto d = to_double(v)) return *d;
  throw BadValue{"expected a number, got '" + std::string(v) + "'"};
}

int need_int(std::string_view v) {
  const auto i = to_integer(v);
  if (!i || *i < std::numeric_limits<int>::min() || *i > std::numeric_limits<int>::max())
    throw BadValue{"expected an integer, got '" + std::string(v) + "'"};
  return static_cast<int>(*i);
}

bool need_bool(std::string_view v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw BadValue{"expected true or false, got '" + std::string(v) + "'"};
}

template <class F>
auto need_enum(std::string_view v, F parse) {
  try {
    return parse(v);
  } catch (const std::invalid_argument& e) {
    throw BadValue{e.what()};
  }
}

std::vector<CorrelationKind> need_kinds(std::string_view v) {
  std::vector<CorrelationKind> out;
  if (v == "none" || v.empty()) return out;
  for (auto part : split(v, ',')) {
    const auto k = need_enum(part, parse_correlation_kind);
    for (auto seen : out)
      if (seen == k) throw BadValue{"kind '" + std::string(part) + "' listed twice"};
    out.push_back(k);
  }
  return out;
}

SlotLayout need_slots(std::string_view v, bool allow_bins) {
  const auto parts = split(v, ',');
  if (parts.size() != 3) throw BadValue{"expected 'lo, hi, count'"};
  SlotLayout s;
  s.lo = need_double(parts[0]);
  s.hi = need_double(parts[1]);
  if (allow_bins && parts[2] == "bins") {
    s.count = 0;
  } else {
    s.count = need_int(parts[2]);
    if (s.count < 1) throw BadValue{allow_bins ? "count must be >= 1 or 'bins'" : "count must be >= 1"};
  }
  if (!(s.hi > s.lo)) throw BadValue{"needs lo < hi"};
  return s;
}

std::vector<std::pair<double, double>> need_bands(std::string_view v) {
  std::vector<std::pair<double, double>> out;
  if (v == "none" || v.empty()) return out;
  for (auto part : split(v, ',')) {
    const auto ends = split(part, ':');
    if (ends.size() != 2) throw BadValue{"expected bands as 'lo:hi, lo:hi'"};
    out.emplace_back(need_double(ends[0]), need_double(ends[1]));
  }
  return out;
}

std::string kinds_text(const std::vector<CorrelationKind>& kinds) {
  if (kinds.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < kinds.size(); ++i) out += (i ? ", " : "") + to_string(kinds[i]);
  return out;
}

std::string slots_text(const SlotLayout& s) {
  return fmt(s.lo) + ", " + fmt(s.hi) + ", " + (s.count == 0 ? std::string("bins") : std::to_string(s.count));
}

std::string bands_text(const std::vector<std::pair<double, double>>& bands) {
  if (bands.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < bands.size(); ++i) out += (i ? ", " : "") + fmt(bands[i].first) + ":" + fmt(bands[i].second);
  return out;
}

/// Section/key dispatch shared by the run and physical-unit formats.
class KeyTable {
 public:
  using Handler = std::function<void(std::string_view)>;

  void add(std::string section, std::string key, Handler h) {
    sections_.insert(section);
    handlers_[section + "." + key] = std::move(h);
  }

  /// Applies every line; returns the line-level problems and records the keys they concern.
  void run(std::string_view text) {
    std::string section;
    std::set<std::string> assigned;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto end = text.find('\n', start);
      std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      start = end == std::string_view::npos ? text.size() + 1 : end + 1;
      ++line_no;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const std::string where = "line " + std::to_string(line_no) + ": ";
      if (line.front() == '[') {
        if (line.back() != ']') {
          problems.push_back(where + "malformed section header");
          section = "?";
          continue;
        }
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (!sections_.count(section)) {
          problems.push_back(where + "unknown section [" + section + "]");
          section = "?";
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        problems.push_back(where + "expected 'key = value'");
        continue;
      }
      if (section == "?") continue;  // already reported
      const std::string key = std::string(trim(line.substr(0, eq)));
      const auto value = trim(line.substr(eq + 1));
      if (section.empty()) {
        problems.push_back(where + key + ": key outside of any section");
        continue;
      }
      const std::string full = section + "." + key;
      const auto it = handlers_.find(full);
      if (it == handlers_.end()) {
        problems.push_back(where + full + ": unknown key");
        continue;
      }
      if (!assigned.insert(full).second) {
        problems.push_back(where + full + ": assigned more than once");
        flagged.insert(full);
        continue;
      }
      try {
        it->second(value);
      } catch (const BadValue& e) {
        problems.push_back(where + full + ": " + e.message);
        flagged.insert(full);
      }
    }
  }

  /// Appends constraint problems ("key: message") unless that key already has a line error.
  void add_constraints(const std::vector<std::string>& more) {
    for (const auto& p : more) {
      const auto colon = p.find(':');
      if (colon != std::string::npos && flagged.count(p.substr(0, colon))) continue;
      problems.push_back(p);
    }
  }

  std::vector<std::string> problems;
  std::set<std::string> flagged;

 private:
  std::set<std::string> sections_;
  std::map<std::string, Handler> handlers_;
};

void modulation_keys(KeyTable& t, const std::string& section, ModulationSpec& m) {
  t.add(section, "modulation", [&m](auto v) { m.kind = need_enum(v, parse_modulation_kind); });
  t.add(section, "zeta_m", [&m](auto v) {
    m.period = need_double(v);
    if (m.period <= 0.0) throw BadValue{"modulation period must be > 0"};
  });
  t.add(section, "depth", [&m](auto v) { m.depth = need_double(v); });
}

void write_modulation(std::ostream& os, const ModulationSpec& m) {
  os << "modulation = " << to_string(m.kind) << "\n";
  if (m.kind == ModulationKind::none) return;
  os << "zeta_m = " << fmt(m.period) << "\n";
  os << "depth = " << fmt(m.depth) << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument([&] {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  auto& ph = c.physics;
  auto& st = c.settings;
  KeyTable t;

  t.add("fiber", "model", [&](auto v) { ph.model = need_enum(v, parse_model); });
  t.add("fiber", "length", [&](auto v) { ph.length = need_double(v); });
  modulation_keys(t, "dispersion", ph.dispersion_mod);
  t.add("birefringence", "b", [&](auto v) { ph.b = need_double(v); });
  modulation_keys(t, "birefringence", ph.birefringence_mod);
  t.add("group_delay", "b1", [&](auto v) { ph.b1 = need_double(v); });
  modulation_keys(t, "group_delay", ph.group_delay_mod);

  t.add("input", "shape", [&](auto v) {
    if (v == "single") ph.initial.pair = false;
    else if (v == "pair") ph.initial.pair = true;
    else throw BadValue{"expected single or pair, got '" + std::string(v) + "'"};
  });
  t.add("input", "u0", [&](auto v) { ph.initial.u0 = need_double(v); });
  t.add("input", "units", [&](auto v) { ph.units = need_enum(v, parse_units); });
  t.add("input", "T", [&](auto v) { ph.initial.t_sep = need_double(v); });
  t.add("input", "dw", [&](auto v) { ph.initial.d_omega = need_double(v); });

  t.add("grid", "n_points", [&](auto v) {
    const int n = need_int(v);
    if (n < 2) throw BadValue{"must be >= 2"};
    st.n_points = static_cast<std::size_t>(n);
  });
  t.add("grid", "tau_min", [&](auto v) { st.tau_min = need_double(v); });
  t.add("grid", "tau_max", [&](auto v) { st.tau_max = need_double(v); });
  t.add("grid", "n_steps", [&](auto v) {
    if (v == "auto") {
      st.n_steps = 0;
      return;
    }
    st.n_steps = need_int(v);
    if (st.n_steps < 1) throw BadValue{"must be >= 1 or auto"};
  });
  t.add("grid", "checkpoint_stride", [&](auto v) { st.checkpoint_stride = need_int(v); });

  t.add("measure", "theta", [&](auto v) {
    if (v == "auto") st.theta.reset();
    else st.theta = need_double(v);
  });
  t.add("measure", "normalization", [&](auto v) { st.normalization = need_enum(v, parse_normalization); });
  t.add("measure", "threads", [&](auto v) { st.threads = need_int(v); });
  t.add("measure", "split_at", [&](auto v) { st.split_at = need_double(v); });
  t.add("measure", "support_fraction", [&](auto v) { st.support_fraction = need_double(v); });
  t.add("measure", "time_kinds", [&](auto v) { st.time_kinds = need_kinds(v); });
  t.add("measure", "time_slots", [&](auto v) { st.time_slots = need_slots(v, false); });
  t.add("measure", "spectral_kinds", [&](auto v) { st.spectral_kinds = need_kinds(v); });
  t.add("measure", "spectral_slots", [&](auto v) { st.spectral_slots = need_slots(v, true); });
  t.add("measure", "spectral_bands", [&](auto v) { st.spectral_bands = need_bands(v); });

  t.add("output", "directory", [&](auto v) { c.output_dir = std::string(v); });
  t.add("output", "intensity_map", [&](auto v) { st.intensity_map = need_bool(v); });
  t.add("output", "spectra", [&](auto v) { st.spectra = need_bool(v); });
  t.add("output", "curve_points", [&](auto v) { st.curve_points = need_int(v); });

  t.run(text);
  t.add_constraints(ph.problems());
  t.add_constraints(st.problems());
  if (!t.problems.empty()) throw ConfigError(std::move(t.problems));
  return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string serialize_config(const RunConfig& c) {
  const auto& ph = c.physics;
  const auto& st = c.settings;
  std::ostringstream os;
  os << "[fiber]\nmodel = " << to_string(ph.model) << "\nlength = " << fmt(ph.length) << "\n\n";
  os << "[dispersion]\n";
  write_modulation(os, ph.dispersion_mod);
  if (ph.model == Model::birefringent) {
    os << "\n[birefringence]\nb = " << fmt(ph.b) << "\n";
    write_modulation(os, ph.birefringence_mod);
    os << "\n[group_delay]\nb1 = " << fmt(ph.b1) << "\n";
    write_modulation(os, ph.group_delay_mod);
  }
  os << "\n[input]\nshape = " << (ph.initial.pair ? "pair" : "single") << "\nu0 = " << fmt(ph.initial.u0)
     << "\nunits = " << to_string(ph.units) << "\n";
  if (ph.initial.pair) os << "T = " << fmt(ph.initial.t_sep) << "\ndw = " << fmt(ph.initial.d_omega) << "\n";
  os << "\n[grid]\nn_points = " << st.n_points << "\ntau_min = " << fmt(st.tau_min) << "\ntau_max = " << fmt(st.tau_max)
     << "\nn_steps = " << (st.n_steps > 0 ? std::to_string(st.n_steps) : std::string("auto"))
     << "\ncheckpoint_stride = " << st.checkpoint_stride << "\n";
  os << "\n[measure]\ntheta = " << (st.theta ? fmt(*st.theta) : std::string("auto"))
     << "\nnormalization = " << to_string(st.normalization) << "\nthreads = " << st.threads
     << "\nsplit_at = " << fmt(st.split_at) << "\nsupport_fraction = " << fmt(st.support_fraction)
     << "\ntime_kinds = " << kinds_text(st.time_kinds) << "\ntime_slots = " << slots_text(st.time_slots)
     << "\nspectral_kinds = " << kinds_text(st.spectral_kinds)
     << "\nspectral_slots = " << slots_text(st.spectral_slots)
     << "\nspectral_bands = " << bands_text(st.spectral_bands) << "\n";
  os << "\n[output]\n";
  if (!c.output_dir.empty()) os << "directory = " << c.output_dir << "\n";
  os << "intensity_map = " << (st.intensity_map ? "true" : "false") << "\nspectra = " << (st.spectra ? "true" : "false")
     << "\ncurve_points = " << st.curve_points << "\n";
  return os.str();
}

RunConfig from_scenario(const Scenario& s) { return RunConfig{s.physics, s.settings, {}}; }

PhysicalParams parse_physical_config(std::string_view text) {
  PhysicalParams p;
  KeyTable t;
  bool beta2_given = false;
  t.add("physical", "model", [&](auto v) { p.model = need_enum(v, parse_model); });
  t.add("physical", "t0", [&](auto v) { p.t0 = need_double(v); });
  t.add("physical", "beta2_avg", [&](auto v) { p.beta2_avg = need_double(v); });
  t.add("physical", "gamma", [&](auto v) { p.gamma = need_double(v); });
  t.add("physical", "a_eff", [&](auto v) { p.a_eff = need_double(v); });
  t.add("physical", "refractive_index", [&](auto v) { p.refractive_index = need_double(v); });
  t.add("physical", "length", [&](auto v) { p.length = need_double(v); });
  auto coefficient = [&](const std::string& section, PhysicalCoefficient& c, bool* given) {
    t.add(section, "base", [&c, given](auto v) {
      c.base = need_double(v);
      if (given) *given = true;
    });
    t.add(section, "modulation", [&c](auto v) { c.modulation.kind = need_enum(v, parse_modulation_kind); });
    t.add(section, "period_m", [&c](auto v) {
      c.modulation.period = need_double(v);
      if (c.modulation.period <= 0.0) throw BadValue{"modulation period must be > 0"};
    });
    t.add(section, "depth", [&c](auto v) { c.modulation.depth = need_double(v); });
    t.add(section, "sense", [&c](auto v) { c.sense = need_double(v); });
  };
  coefficient("beta2", p.beta2, &beta2_given);
  coefficient("delta_beta1", p.delta_beta1, nullptr);
  coefficient("delta_beta", p.delta_beta, nullptr);
  t.run(text);
  if (!beta2_given) p.beta2.base = p.beta2_avg;
  t.add_constraints(p.problems());
  if (!t.problems.empty()) throw ConfigError(std::move(t.problems));
  return p;
}

}  // namespace vsq
