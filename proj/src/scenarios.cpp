#include "vsq/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "vsq/error.hpp"
#include "vsq/io.hpp"

namespace vsq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kVacuumPermittivity = 8.8541878128e-12;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

void check_modulation(const ModulationSpec& m, const std::string& section, std::vector<std::string>& out,
                      const char* period_key = "zeta_m") {
  if (m.kind == ModulationKind::none) return;
  if (!std::isfinite(m.period) || m.period <= 0.0)
    out.push_back(section + "." + period_key + ": modulation period must be > 0");
  if (!std::isfinite(m.depth) || m.depth < 0.0 || m.depth >= 1.0)
    out.push_back(section + ".depth: modulation depth must lie in [0, 1)");
}

void report(const Progress& progress, const std::string& msg) {
  if (progress) progress(msg);
}

}  // namespace

std::string_view to_string(Model m) {
  switch (m) {
    case Model::manakov: return "manakov";
    case Model::birefringent: return "birefringent";
    case Model::linear: return "linear";
  }
  return "?";
}

Model parse_model(std::string_view s) {
  if (s == "manakov") return Model::manakov;
  if (s == "birefringent") return Model::birefringent;
  if (s == "linear") return Model::linear;
  throw InvalidArgument("unknown model '" + std::string(s) + "'");
}

std::string_view to_string(AmplitudeUnits u) { return u == AmplitudeUnits::field ? "field" : "soliton_order"; }

AmplitudeUnits parse_units(std::string_view s) {
  if (s == "field") return AmplitudeUnits::field;
  if (s == "soliton_order") return AmplitudeUnits::soliton_order;
  throw InvalidArgument("unknown amplitude units '" + std::string(s) + "'");
}

std::string_view to_string(ModulationKind k) {
  switch (k) {
    case ModulationKind::none: return "none";
    case ModulationKind::sine: return "sine";
    case ModulationKind::truncated_sine: return "truncated_sine";
  }
  return "?";
}

ModulationKind parse_modulation_kind(std::string_view s) {
  if (s == "none") return ModulationKind::none;
  if (s == "sine") return ModulationKind::sine;
  if (s == "truncated_sine") return ModulationKind::truncated_sine;
  throw InvalidArgument("unknown modulation '" + std::string(s) + "'");
}

FiberProfile PhysicsSetup::profile() const {
  switch (model) {
    case Model::manakov: return FiberProfile::manakov(length, dispersion_mod);
    case Model::birefringent:
      return FiberProfile::birefringent(length, b, b1, dispersion_mod, birefringence_mod, group_delay_mod);
    case Model::linear: {
      auto p = FiberProfile::linear(length);
      p.dispersion.modulation = dispersion_mod;
      return p;
    }
  }
  throw InvalidArgument("unknown model");
}

double PhysicsSetup::amplitude_scale() const {
  if (units == AmplitudeUnits::field) return 1.0;
  const auto p = profile();
  const double sum = p.a_coef + p.b_coef + p.c_coef;
  return sum > 0.0 ? std::sqrt(2.0 / sum) : 1.0;
}

PolarizedField PhysicsSetup::initial_field(const TemporalGrid& grid) const {
  const double amp = initial.u0 * amplitude_scale();
  if (initial.pair) return make_initial_pair(grid, amp, initial.t_sep, initial.d_omega);
  return make_initial_single(grid, amp);
}

std::vector<std::string> PhysicsSetup::problems() const {
  std::vector<std::string> out;
  if (!std::isfinite(initial.u0) || initial.u0 <= 0.0) out.push_back("input.u0: amplitude must be > 0");
  if (!std::isfinite(initial.t_sep)) out.push_back("input.T: must be finite");
  if (!std::isfinite(initial.d_omega)) out.push_back("input.dw: must be finite");
  if (!initial.pair && (initial.t_sep != 0.0 || initial.d_omega != 0.0))
    out.push_back("input.shape: T and dw need shape = pair");
  if (!std::isfinite(length) || length < 0.0) out.push_back("fiber.length: must be >= 0");
  if (!std::isfinite(b)) out.push_back("birefringence.b: must be finite");
  if (!std::isfinite(b1)) out.push_back("group_delay.b1: must be finite");
  if (model != Model::birefringent) {
    if (b != 0.0) out.push_back("birefringence.b: only the birefringent model has birefringence");
    if (b1 != 0.0) out.push_back("group_delay.b1: only the birefringent model has a group delay");
    if (birefringence_mod.kind != ModulationKind::none)
      out.push_back("birefringence.modulation: only the birefringent model has birefringence");
    if (group_delay_mod.kind != ModulationKind::none)
      out.push_back("group_delay.modulation: only the birefringent model has a group delay");
  }
  check_modulation(dispersion_mod, "dispersion", out);
  check_modulation(birefringence_mod, "birefringence", out);
  check_modulation(group_delay_mod, "group_delay", out);
  return out;
}

SlotSpec RunSettings::time_slot_spec() const {
  return SlotSpec::uniform(SlotDomain::time, time_slots.lo, time_slots.hi, time_slots.count);
}

SlotSpec RunSettings::spectral_slot_spec() const {
  if (spectral_slots.count > 0)
    return SlotSpec::uniform(SlotDomain::frequency, spectral_slots.lo, spectral_slots.hi, spectral_slots.count);
  const double dw = grid().d_omega();
  const int m_lo = static_cast<int>(std::ceil(spectral_slots.lo / dw - 1e-9));
  const int m_hi = static_cast<int>(std::floor(spectral_slots.hi / dw + 1e-9)) + 1;
  return SlotSpec::frequency_bins(grid(), m_lo, m_hi);
}

std::vector<std::string> RunSettings::problems() const {
  std::vector<std::string> out;
  bool grid_ok = true;
  try {
    (void)grid();
  } catch (const std::exception& e) {
    out.push_back(std::string("grid: ") + e.what());
    grid_ok = false;
  }
  if (n_steps < 0) out.push_back("grid.n_steps: must be >= 1 or auto");
  if (checkpoint_stride < 1) out.push_back("grid.checkpoint_stride: must be >= 1");
  if (theta && !std::isfinite(*theta)) out.push_back("measure.theta: must be finite or auto");
  if (threads < 0) out.push_back("measure.threads: must be >= 0");
  if (!std::isfinite(split_at)) out.push_back("measure.split_at: must be finite");
  if (!(support_fraction >= 0.0 && support_fraction < 1.0))
    out.push_back("measure.support_fraction: must lie in [0, 1)");
  if (curve_points < 0 || curve_points == 1) out.push_back("output.curve_points: must be 0 or >= 2");
  if (grid_ok && !time_kinds.empty()) {
    try {
      time_slot_spec().validate(grid());
    } catch (const std::exception& e) {
      out.push_back(std::string("measure.time_slots: ") + e.what());
    }
  }
  if (grid_ok && !spectral_kinds.empty()) {
    try {
      spectral_slot_spec().validate(grid());
    } catch (const std::exception& e) {
      out.push_back(std::string("measure.spectral_slots: ") + e.what());
    }
  }
  for (const auto& [lo, hi] : spectral_bands)
    if (!(hi > lo) || lo < 0.0) out.push_back("measure.spectral_bands: each band needs 0 <= lo < hi");
  return out;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"fig1",       "fig2a",        "fig2b", "fig2c", "fig3",
                                                 "fig4_5_mod", "fig4_5_nomod", "fig6a", "fig6c", "fig6e",
                                                 "fig7a",      "fig7c"};
  return names;
}

Scenario scenario(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  auto& ph = s.physics;
  auto& st = s.settings;
  ph.length = 2.0 * kPi;
  ph.units = AmplitudeUnits::soliton_order;
  const auto sine = [](double period) { return ModulationSpec::sine(period, 0.2); };

  auto manakov_single = [&](ModulationSpec mod) {
    ph.model = Model::manakov;
    ph.initial = {false, 2.0, 0.0, 0.0};
    ph.dispersion_mod = mod;
    st.time_kinds = {CorrelationKind::complete};
    st.curve_points = 32;
  };
  auto manakov_pair = [&](double t_sep, double d_omega, ModulationSpec mod) {
    ph.model = Model::manakov;
    ph.initial = {true, 2.0, t_sep, d_omega};
    ph.dispersion_mod = mod;
    st.curve_points = 32;
  };
  auto birefringent = [&](double u0, double b1, double b) {
    ph.model = Model::birefringent;
    ph.initial = {false, u0, 0.0, 0.0};
    ph.b = b;
    ph.b1 = b1;
    st.time_kinds = {CorrelationKind::complete};
  };

  if (name == "fig1") {
    s.caption = "Manakov, single pulse u0=2, sine dispersion modulation zeta_m=1.3, L=2 pi: spectra and S";
    manakov_single(sine(1.3));
    st.time_kinds.clear();
    st.curve_points = 0;
    st.spectral_kinds = {CorrelationKind::complete};
    st.spectral_bands = {{0.3, 1.2}, {1.2, 2.2}};
  } else if (name == "fig2a") {
    s.caption = "Manakov, single pulse u0=2, sine modulation zeta_m=1.3, L=2 pi: R(zeta) and C";
    manakov_single(sine(1.3));
  } else if (name == "fig2b") {
    s.caption = "Manakov, single pulse u0=2, truncated sine modulation zeta_m=1.3, L=2 pi";
    manakov_single(ModulationSpec::truncated_sine(1.3, 0.2));
  } else if (name == "fig2c") {
    s.caption = "Manakov, single pulse u0=2, sine modulation zeta_m=pi/2, L=2 pi";
    manakov_single(sine(kPi / 2.0));
  } else if (name == "fig3") {
    s.caption = "Manakov, pulse pair u0=2, T=1, dw=0, sine modulation zeta_m=0.83, L=2 pi";
    manakov_pair(1.0, 0.0, sine(0.83));
    st.time_kinds = {CorrelationKind::complete};
  } else if (name == "fig4_5_mod") {
    s.caption = "Manakov, pulse pair u0=2, T=3, dw=1, sine modulation zeta_m=1.3, L=2 pi";
    manakov_pair(3.0, 1.0, sine(1.3));
    st.time_kinds = {CorrelationKind::xx, CorrelationKind::yy, CorrelationKind::xy, CorrelationKind::complete};
  } else if (name == "fig4_5_nomod") {
    s.caption = "Manakov, pulse pair u0=2, T=3, dw=1, no modulation, L=2 pi";
    manakov_pair(3.0, 1.0, ModulationSpec::none());
    st.time_kinds = {CorrelationKind::xx, CorrelationKind::yy, CorrelationKind::xy, CorrelationKind::complete};
  } else if (name == "fig6a") {
    s.caption = "Birefringent, u0=1.8, b1=2, b=20, no modulation, L=2 pi";
    birefringent(1.8, 2.0, 20.0);
  } else if (name == "fig6c") {
    s.caption = "Birefringent, u0=2.12, b1=2, b=20, no modulation, L=2 pi";
    birefringent(2.12, 2.0, 20.0);
  } else if (name == "fig6e") {
    s.caption = "Birefringent, u0=2.83, b1=2, b=20, no modulation, L=2 pi";
    birefringent(2.83, 2.0, 20.0);
  } else if (name == "fig7a") {
    s.caption = "Birefringent, u0=2.83, b1=4, b=40, no modulation, L=2 pi";
    birefringent(2.83, 4.0, 40.0);
  } else if (name == "fig7c") {
    s.caption =
        "Birefringent, u0=2.83, b1=4(1+0.01 sin), b=40(1+0.01 sin), D=1-0.2 sin, zeta_m=1.3, L=2 pi";
    birefringent(2.83, 4.0, 40.0);
    ph.dispersion_mod = sine(1.3);
    ph.birefringence_mod = ModulationSpec::sine(1.3, 0.01);
    ph.group_delay_mod = ModulationSpec::sine(1.3, 0.01);
  } else {
    throw InvalidArgument("unknown scenario '" + std::string(name) + "'");
  }
  return s;
}

Scenario apply_overrides(Scenario s, const ScenarioOverrides& o) {
  auto& st = s.settings;
  if (o.n_points) st.n_points = *o.n_points;
  if (o.tau_min) st.tau_min = *o.tau_min;
  if (o.tau_max) st.tau_max = *o.tau_max;
  if (o.n_steps) st.n_steps = *o.n_steps;
  if (o.checkpoint_stride) st.checkpoint_stride = *o.checkpoint_stride;
  if (o.time_slots) st.time_slots = *o.time_slots;
  if (o.spectral_slots) st.spectral_slots = *o.spectral_slots;
  if (o.threads) st.threads = *o.threads;
  if (o.curve_points) st.curve_points = *o.curve_points;
  return s;
}

void Metrics::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = std::move(value);
      return;
    }
  entries_.emplace_back(std::move(key), std::move(value));
}

void Metrics::set(std::string key, double value) { set(std::move(key), format_double(value)); }

void Metrics::set(std::string key, long long value) { set(std::move(key), std::to_string(value)); }

const std::string* Metrics::find(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

std::size_t summarize_classical(const Trajectory& traj, const RunSettings& st,
                                const std::optional<std::filesystem::path>& out_dir, Metrics& mx) {
  const auto& g = traj.grid();
  if (out_dir) std::filesystem::create_directories(*out_dir);

  mx.set("n_points", static_cast<long long>(g.size()));
  mx.set("tau_min", g.tau_min());
  mx.set("tau_max", g.tau_max());
  mx.set("n_steps", static_cast<long long>(traj.n_steps()));
  mx.set("d_zeta", traj.d_zeta());
  mx.set("energy_in", traj.initial().energy());
  mx.set("energy_out", traj.final_field().energy());

  const rvec spectrum = output_spectrum(traj);
  const double peak = spectrum.empty() ? 0.0 : *std::max_element(spectrum.begin(), spectrum.end());
  const rvec omegas = g.omegas_monotone();
  const auto maxima = peak > 0.0 ? prominent_maxima(spectrum, 0.01 * peak) : std::vector<std::size_t>{};
  mx.set("spectral_maxima", static_cast<long long>(maxima.size()));
  {
    std::string where;
    for (auto i : maxima) where += (where.empty() ? "" : " ") + format_double(omegas[i]);
    mx.set("spectral_maxima_at", where);
  }

  if (out_dir) {
    if (st.spectra) {
      const auto [first, second] = split_spectra(traj, st.split_at);
      write_columns_csv(*out_dir / "spectrum.csv", {"omega", "total", "before_split", "after_split"},
                        {omegas, spectrum, first, second});
    }
    if (st.intensity_map) write_intensity_map(traj, *out_dir / "intensity_map");
    write_snapshot_csv(*out_dir / "output_field.csv", traj.final_field());
  }

  return maxima.size();
}

namespace {

void record_extremum(Metrics& m, const std::string& prefix, const Extremum& e) {
  if (!e.found) {
    m.set(prefix, std::string("nan"));
    return;
  }
  m.set(prefix, e.value);
  m.set(prefix + "_at", format_double(e.at_i) + " " + format_double(e.at_j));
}

void record_matrix(Metrics& metrics, const std::string& name, const CorrelationMatrix& m, const RunSettings& st) {
  const RegionFilter region{st.split_at, st.support_fraction};
  const auto intra = intrapulse_extrema(m, region);
  const auto inter = interpulse_extrema(m, region);
  const auto all = matrix_extrema(m, region);
  record_extremum(metrics, name + ".intra_min", intra.min);
  record_extremum(metrics, name + ".intra_max", intra.max);
  record_extremum(metrics, name + ".inter_min", inter.min);
  record_extremum(metrics, name + ".inter_max", inter.max);
  record_extremum(metrics, name + ".min", all.min);
  record_extremum(metrics, name + ".max", all.max);
  metrics.set(name + ".imag_residue", m.max_imag_residue);
}

void write_matrix_outputs(const std::filesystem::path& dir, const std::string& stem, const CorrelationMatrix& m) {
  write_matrix_text(dir / (stem + ".txt"), m);
  write_matrix_binary(dir / (stem + ".bin"), m);
  write_heatmap(m, dir / (stem + ".ppm"));
}

ResponseOptions needs(const std::vector<CorrelationKind>& kinds, int threads) {
  ResponseOptions o;
  o.threads = threads;
  o.polarized = std::any_of(kinds.begin(), kinds.end(), [](auto k) { return k != CorrelationKind::complete; });
  o.combined = std::any_of(kinds.begin(), kinds.end(), [](auto k) { return k == CorrelationKind::complete; });
  return o;
}

RunResult measure_trajectory(const Trajectory& traj, const RunSettings& st,
                             const std::optional<std::filesystem::path>& out_dir, const Progress& progress,
                             Metrics seed) {
  RunResult res;
  res.metrics = std::move(seed);
  auto& mx = res.metrics;
  res.spectral_maxima = summarize_classical(traj, st, out_dir, mx);

  if (traj.final_field().energy() == 0.0) throw UndefinedMeasurement("output field is zero; nothing to measure");

  report(progress, "squeezing landscape");
  const SqueezingLandscape landscape(traj, st.threads);
  if (st.theta) {
    res.theta = *st.theta;
    res.r_min = landscape(*st.theta);
    mx.set("theta_mode", std::string("fixed"));
  } else {
    const auto opt = optimize_theta(landscape);
    res.theta = opt.theta;
    res.r_min = opt.r_min;
    res.theta_flat = opt.flat;
    mx.set("theta_mode", std::string("auto"));
  }
  mx.set("theta_opt", res.theta);
  mx.set("r_min", res.r_min);
  mx.set("theta_flat", std::string(res.theta_flat ? "true" : "false"));
  if (out_dir) {
    rvec th, r;
    for (int i = 0; i < 360; ++i) {
      th.push_back(2.0 * kPi * i / 360.0);
      r.push_back(landscape(th.back()));
    }
    write_columns_csv(*out_dir / "r_theta.csv", {"theta", "R"}, {th, r});
  }

  if (st.curve_points > 0) {
    report(progress, "R(zeta) curve");
    const auto curve = squeezing_curve(traj, st.curve_points, st.threads);
    if (out_dir) {
      rvec z, r;
      for (const auto& [zeta, rv] : curve) {
        z.push_back(zeta);
        r.push_back(rv);
      }
      write_columns_csv(*out_dir / "r_zeta.csv", {"zeta", "R_min"}, {z, r});
    }
  }

  auto measure = [&](const std::vector<CorrelationKind>& kinds, const SlotSpec& slots, const char* prefix,
                     std::vector<CorrelationMatrix>& sink) {
    if (kinds.empty()) return;
    report(progress, std::string(prefix) + " slot responses (" + std::to_string(slots.centers.size()) + " slots)");
    const auto responses = compute_slot_responses(traj, res.theta, slots, needs(kinds, st.threads));
    for (auto kind : kinds) {
      auto m = assemble_correlation(responses, kind, st.normalization);
      const std::string name = std::string(prefix) + "_" + to_string(kind);
      record_matrix(mx, name, m, st);
      if (slots.domain == SlotDomain::frequency)
        for (const auto& [lo, hi] : st.spectral_bands) {
          const auto e = band_extrema(m, lo, hi, st.support_fraction);
          const std::string band = name + ".band_" + format_double(lo) + "_" + format_double(hi);
          record_extremum(mx, band + "_min", e.min);
          record_extremum(mx, band + "_max", e.max);
        }
      if (out_dir) write_matrix_outputs(*out_dir, name, m);
      sink.push_back(std::move(m));
    }
  };
  measure(st.time_kinds, st.time_kinds.empty() ? SlotSpec{} : st.time_slot_spec(), "C", res.time_matrices);
  measure(st.spectral_kinds, st.spectral_kinds.empty() ? SlotSpec{} : st.spectral_slot_spec(), "S",
          res.spectral_matrices);
  mx.set("normalization", std::string(to_string(st.normalization)));
  mx.set("support_fraction", st.support_fraction);

  if (out_dir) write_metrics(*out_dir / "metrics.txt", mx);
  return res;
}

}  // namespace

RunResult run_measurements(const Trajectory& traj, const RunSettings& settings,
                           const std::optional<std::filesystem::path>& out_dir, const Progress& progress) {
  return measure_trajectory(traj, settings, out_dir, progress, {});
}

Trajectory propagate_setup(const PhysicsSetup& physics, const RunSettings& settings, const Progress& progress) {
  auto problems = physics.problems();
  const auto more = settings.problems();
  problems.insert(problems.end(), more.begin(), more.end());
  if (!problems.empty()) throw InvalidParameter(join(problems, "; "));

  const int steps = settings.steps_for(physics.length);
  report(progress, "propagating " + std::to_string(steps) + " steps");
  PropagationOptions popts;
  popts.checkpoint_stride = settings.checkpoint_stride;
  return propagate_classical(physics.initial_field(settings.grid()), physics.profile(), steps, popts);
}

RunResult run_pipeline(const PhysicsSetup& physics, const RunSettings& settings,
                       const std::optional<std::filesystem::path>& out_dir, const Progress& progress) {
  const auto traj = propagate_setup(physics, settings, progress);

  Metrics seed;
  seed.set("model", std::string(to_string(physics.model)));
  seed.set("u0", physics.initial.u0);
  seed.set("amplitude_units", std::string(to_string(physics.units)));
  seed.set("amplitude_scale", physics.amplitude_scale());
  return measure_trajectory(traj, settings, out_dir, progress, std::move(seed));
}

RunResult run_scenario(std::string_view name, const ScenarioOverrides& overrides,
                       const std::optional<std::filesystem::path>& out_dir, const Progress& progress) {
  const auto s = apply_overrides(scenario(name), overrides);
  return run_pipeline(s.physics, s.settings, out_dir, progress);
}

std::vector<std::string> PhysicalParams::problems() const {
  std::vector<std::string> out;
  auto positive = [&](double v, const char* key) {
    if (!std::isfinite(v) || v <= 0.0) out.push_back(std::string(key) + ": must be > 0");
  };
  positive(t0, "physical.t0");
  if (!std::isfinite(beta2_avg) || beta2_avg == 0.0) out.push_back("physical.beta2_avg: must be nonzero");
  if (!std::isfinite(gamma) || gamma < 0.0) out.push_back("physical.gamma: must be >= 0");
  positive(a_eff, "physical.a_eff");
  positive(refractive_index, "physical.refractive_index");
  if (!std::isfinite(length) || length < 0.0) out.push_back("physical.length: must be >= 0");
  auto coefficient = [&](const PhysicalCoefficient& c, const std::string& key) {
    if (!std::isfinite(c.base)) out.push_back(key + ".base: must be finite");
    check_modulation(c.modulation, key, out, "period_m");
  };
  coefficient(beta2, "beta2");
  coefficient(delta_beta1, "delta_beta1");
  coefficient(delta_beta, "delta_beta");
  if (model != Model::birefringent && (delta_beta1.base != 0.0 || delta_beta.base != 0.0))
    out.push_back("physical.model: only the birefringent model has delta_beta and delta_beta1");
  return out;
}

namespace {

ModulatedCoefficient scaled(const PhysicalCoefficient& c, double factor, double length_scale) {
  ModulatedCoefficient m{c.base * factor, c.modulation, c.sense};
  m.modulation.period *= length_scale;
  return m;
}

PhysicalCoefficient unscaled(const ModulatedCoefficient& c, double factor, double length_scale) {
  PhysicalCoefficient p{c.base / factor, c.modulation, c.sense};
  p.modulation.period /= length_scale;
  return p;
}

FiberProfile model_profile(Model model) {
  PhysicsSetup s;
  s.model = model;
  return s.profile();
}

}  // namespace

std::pair<FiberProfile, ScaleReport> normalize(const PhysicalParams& p) {
  if (const auto problems = p.problems(); !problems.empty()) throw InvalidParameter(join(problems, "; "));
  ScaleReport r;
  const double s = std::abs(p.beta2_avg);
  r.t0 = p.t0;
  r.beta2_avg = p.beta2_avg;
  r.gamma = p.gamma;
  r.a_eff = p.a_eff;
  r.refractive_index = p.refractive_index;
  r.zeta_per_meter = s / (p.t0 * p.t0);
  r.dispersion_length = 1.0 / r.zeta_per_meter;
  r.f0 = kSpeedOfLight * p.refractive_index * kVacuumPermittivity * p.a_eff * p.t0 * p.t0 * p.gamma / s;
  r.soliton_power = p.gamma > 0.0 ? s / (p.gamma * p.t0 * p.t0) : 0.0;

  FiberProfile f = model_profile(p.model);
  f.dispersion = scaled(p.beta2, -1.0 / s, r.zeta_per_meter);
  f.birefringence = scaled(p.delta_beta, p.t0 * p.t0 / (2.0 * s), r.zeta_per_meter);
  f.group_delay = scaled(p.delta_beta1, p.t0 / (2.0 * s), r.zeta_per_meter);
  f.length = p.length * r.zeta_per_meter;
  return {f, r};
}

PhysicalParams denormalize(const FiberProfile& f, Model model, const ScaleReport& r) {
  if (!(r.t0 > 0.0) || r.beta2_avg == 0.0 || !(r.zeta_per_meter > 0.0))
    throw InvalidParameter("scale report lacks T0 or beta2_avg");
  const double s = std::abs(r.beta2_avg);
  PhysicalParams p;
  p.model = model;
  p.t0 = r.t0;
  p.beta2_avg = r.beta2_avg;
  p.gamma = r.gamma;
  p.a_eff = r.a_eff;
  p.refractive_index = r.refractive_index;
  p.beta2 = unscaled(f.dispersion, -1.0 / s, r.zeta_per_meter);
  p.delta_beta = unscaled(f.birefringence, r.t0 * r.t0 / (2.0 * s), r.zeta_per_meter);
  p.delta_beta1 = unscaled(f.group_delay, r.t0 / (2.0 * s), r.zeta_per_meter);
  p.length = f.length / r.zeta_per_meter;
  return p;
}

}  // namespace vsq
