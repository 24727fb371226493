#include "vsq/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vsq/config.hpp"
#include "vsq/error.hpp"
#include "vsq/io.hpp"

namespace vsq {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::string out;
  std::optional<int> threads;
  bool quiet = false;
};

struct Job {
  RunConfig config;
  fs::path out_dir;
};

Progress progress_for(const Common& c) {
  if (c.quiet) return {};
  return [](std::string_view msg) { std::cerr << "vsq: " << msg << "\n"; };
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::ios_base::failure("cannot write '" + path.string() + "'");
}

Job load_job(const Common& c) {
  Job job{load_config(c.config_path), {}};
  if (c.threads) job.config.settings.threads = *c.threads;
  const std::string dir = c.out.empty() ? job.config.output_dir : c.out;
  if (dir.empty()) throw InvalidArgument("no output directory: pass --out or set [output] directory");
  job.out_dir = dir;
  fs::create_directories(job.out_dir);
  write_text(job.out_dir / "config.ini", serialize_config(job.config));
  return job;
}

void add_common(CLI::App* sub, Common& c, bool needs_config = true) {
  if (needs_config) sub->add_option("-c,--config", c.config_path, "run config file")->required()->check(CLI::ExistingFile);
  sub->add_option("-o,--out", c.out, "output directory (overrides [output] directory)");
  sub->add_option("-j,--threads", c.threads, "worker threads for the measurement stage (0 = all cores)");
  sub->add_flag("-q,--quiet", c.quiet, "no progress messages");
}

void summary(const Common& c, const std::string& line) {
  if (!c.quiet) std::cerr << "vsq: " << line << "\n";
}

int cmd_propagate(const Common& c, int snapshot_stride) {
  const auto job = load_job(c);
  const auto traj = propagate_setup(job.config.physics, job.config.settings, progress_for(c));
  Metrics mx;
  summarize_classical(traj, job.config.settings, job.out_dir, mx);
  write_trajectory(job.out_dir / "trajectory.vsqt", traj, snapshot_stride);
  write_metrics(job.out_dir / "metrics.txt", mx);
  summary(c, "wrote " + job.out_dir.string());
  return 0;
}

int cmd_spectrum(const Common& c) {
  auto job = load_job(c);
  job.config.settings.spectra = true;
  const auto traj = propagate_setup(job.config.physics, job.config.settings, progress_for(c));
  Metrics mx;
  const auto maxima = summarize_classical(traj, job.config.settings, job.out_dir, mx);
  write_metrics(job.out_dir / "metrics.txt", mx);
  summary(c, std::to_string(maxima) + " spectral maxima; wrote " + job.out_dir.string());
  return 0;
}

int cmd_squeeze(const Common& c, std::optional<double> theta) {
  auto job = load_job(c);
  auto& st = job.config.settings;
  st.time_kinds.clear();
  st.spectral_kinds.clear();
  if (theta) st.theta = theta;
  const auto res = run_pipeline(job.config.physics, st, job.out_dir, progress_for(c));
  std::ostringstream os;
  os << "r_min = " << res.r_min << " at theta = " << res.theta;
  summary(c, os.str());
  return 0;
}

int cmd_correlate(const Common& c, const std::vector<std::string>& kinds, const std::string& domain,
                  std::optional<double> theta) {
  auto job = load_job(c);
  auto& st = job.config.settings;
  std::vector<CorrelationKind> parsed;
  for (const auto& k : kinds) parsed.push_back(parse_correlation_kind(k));
  if (domain == "time") {
    st.time_kinds = parsed;
    st.spectral_kinds.clear();
  } else {
    st.spectral_kinds = parsed;
    st.time_kinds.clear();
  }
  if (theta) st.theta = theta;
  run_pipeline(job.config.physics, st, job.out_dir, progress_for(c));
  summary(c, "wrote " + job.out_dir.string());
  return 0;
}

int cmd_scenario(const Common& c, const std::string& name, bool list, const ScenarioOverrides& o) {
  if (list) {
    for (const auto& n : scenario_names()) std::cout << n << "  " << scenario(n).caption << "\n";
    return 0;
  }
  if (name.empty()) throw InvalidArgument("scenario: a NAME or --list is required");
  if (c.out.empty()) throw InvalidArgument("scenario: --out is required");
  auto s = apply_overrides(scenario(name), o);
  const fs::path dir = c.out;
  fs::create_directories(dir);
  write_text(dir / "config.ini", serialize_config(from_scenario(s)));
  const auto res = run_pipeline(s.physics, s.settings, dir, progress_for(c));
  std::ostringstream os;
  os << name << ": r_min = " << res.r_min << ", wrote " << dir.string();
  summary(c, os.str());
  return 0;
}

int cmd_convert(const Common& c, const std::string& physical) {
  const auto params = parse_physical_config(read_text(physical));
  const auto [profile, scale] = normalize(params);
  Metrics mx;
  mx.set("model", std::string(to_string(params.model)));
  mx.set("A", profile.a_coef);
  mx.set("B", profile.b_coef);
  mx.set("C", profile.c_coef);
  auto coefficient = [&](const std::string& key, const ModulatedCoefficient& m) {
    mx.set(key + ".base", m.base);
    mx.set(key + ".modulation", std::string(to_string(m.modulation.kind)));
    mx.set(key + ".zeta_m", m.modulation.period);
    mx.set(key + ".depth", m.modulation.depth);
    mx.set(key + ".sense", m.sense);
  };
  coefficient("D", profile.dispersion);
  coefficient("b", profile.birefringence);
  coefficient("b1", profile.group_delay);
  mx.set("L", profile.length);
  mx.set("zeta_per_meter", scale.zeta_per_meter);
  mx.set("dispersion_length_m", scale.dispersion_length);
  mx.set("F0", scale.f0);
  mx.set("soliton_power_W", scale.soliton_power);
  const fs::path out = c.out.empty() ? fs::path("normalized.txt") : fs::path(c.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_metrics(out, mx);
  summary(c, "wrote " + out.string());
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"vsq: quantum noise and squeezing of vector solitons in fibers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vsq 0.1.0");

  Common common;
  int snapshot_stride = 10;
  std::optional<double> theta;
  std::vector<std::string> kinds{"complete"};
  std::string domain = "time";
  std::string scenario_name;
  bool list = false;
  ScenarioOverrides overrides;
  std::string physical;

  auto* propagate = app.add_subcommand("propagate", "classical propagation: trajectory, intensity map, spectrum");
  add_common(propagate, common);
  propagate->add_option("--snapshot-stride", snapshot_stride, "keep every K-th step in trajectory.vsqt")
      ->check(CLI::PositiveNumber);

  auto* squeeze = app.add_subcommand("squeeze", "optimal squeezing ratio R and its theta landscape");
  add_common(squeeze, common);
  squeeze->add_option("--theta", theta, "fixed local-oscillator phase instead of optimizing");

  auto* correlate = app.add_subcommand("correlate", "photon-number correlation matrices");
  add_common(correlate, common);
  correlate->add_option("--kind", kinds, "xx, yy, xy or complete (repeatable)")
      ->delimiter(',')
      ->check(CLI::IsMember({"xx", "yy", "xy", "complete"}));
  correlate->add_option("--domain", domain, "time or frequency")->check(CLI::IsMember({"time", "frequency"}));
  correlate->add_option("--theta", theta, "fixed local-oscillator phase instead of optimizing");

  auto* spectrum = app.add_subcommand("spectrum", "output spectrum and prominent spectral maxima");
  add_common(spectrum, common);

  auto* scen = app.add_subcommand("scenario", "run a named preset");
  add_common(scen, common, false);
  scen->add_option("name", scenario_name, "preset name (see --list)");
  scen->add_flag("--list", list, "list presets and exit");
  scen->add_option("--n-points", overrides.n_points, "grid points");
  scen->add_option("--tau-min", overrides.tau_min, "window start");
  scen->add_option("--tau-max", overrides.tau_max, "window end");
  scen->add_option("--steps", overrides.n_steps, "propagation steps");
  scen->add_option("--checkpoint-stride", overrides.checkpoint_stride, "steps between stored checkpoints");
  scen->add_option("--curve-points", overrides.curve_points, "R(zeta) samples (0 disables)");

  auto* convert = app.add_subcommand("convert", "physical fiber parameters to normalized coefficients");
  add_common(convert, common, false);
  convert->add_option("physical", physical, "physical-unit parameter file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (propagate->parsed()) return cmd_propagate(common, snapshot_stride);
    if (squeeze->parsed()) return cmd_squeeze(common, theta);
    if (correlate->parsed()) return cmd_correlate(common, kinds, domain, theta);
    if (spectrum->parsed()) return cmd_spectrum(common);
    if (scen->parsed()) {
      if (common.threads) overrides.threads = common.threads;
      return cmd_scenario(common, scenario_name, list, overrides);
    }
    if (convert->parsed()) return cmd_convert(common, physical);
  } catch (const NumericalBlowup& e) {
    std::cerr << "vsq: numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const UndefinedMeasurement& e) {
    std::cerr << "vsq: undefined measurement: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "vsq: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace vsq
