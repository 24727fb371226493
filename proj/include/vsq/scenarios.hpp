#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vsq/lattice.hpp"
#include "vsq/nlse.hpp"
#include "vsq/quantum_meas.hpp"

namespace vsq {

enum class Model { manakov, birefringent, linear };

/// How the input amplitude u0 is read.
///  field:         U_x = U_y = (u0 / sqrt 2) sech(tau) literally.
///  soliton_order: u0 is the scalar soliton order N of the total field; the raw amplitude is
///                 u0 * sqrt(2 / (A + B + C)), so u0 = 1 launches the fundamental vector soliton
///                 of a linearly polarized input.
enum class AmplitudeUnits { field, soliton_order };

std::string_view to_string(Model m);
Model parse_model(std::string_view s);
std::string_view to_string(AmplitudeUnits u);
AmplitudeUnits parse_units(std::string_view s);
std::string_view to_string(ModulationKind k);
ModulationKind parse_modulation_kind(std::string_view s);

struct InitialSpec {
  bool pair = false;
  double u0 = 2.0;
  double t_sep = 0.0;
  double d_omega = 0.0;
  bool operator==(const InitialSpec&) const = default;
};

/// Physics of one run: model, input pulse, modulation and length.
struct PhysicsSetup {
  Model model = Model::manakov;
  AmplitudeUnits units = AmplitudeUnits::soliton_order;
  InitialSpec initial;
  double length = 0.0;
  double b = 0.0;
  double b1 = 0.0;
  ModulationSpec dispersion_mod;
  ModulationSpec birefringence_mod;
  ModulationSpec group_delay_mod;

  FiberProfile profile() const;
  /// Factor turning u0 into the raw sech amplitude (1 for field units or a linear fiber).
  double amplitude_scale() const;
  PolarizedField initial_field(const TemporalGrid& grid) const;
  /// Every violated constraint as "key: message".
  std::vector<std::string> problems() const;
  bool operator==(const PhysicsSetup&) const = default;
};

/// Slot layout: `count` equal slots over [lo, hi) in the time domain; in the frequency domain
/// count = 0 means one slot per transform bin with center in [lo, hi].
struct SlotLayout {
  double lo = -20.0;
  double hi = 20.0;
  int count = 80;
  bool operator==(const SlotLayout&) const = default;
};

/// Numerics and requested measurements; none of these change the physics.
struct RunSettings {
  std::size_t n_points = 4096;
  double tau_min = -20.0;
  double tau_max = 20.0;
  int n_steps = 0;  ///< 0 selects default_steps(L)
  int checkpoint_stride = 1;

  std::optional<double> theta;  ///< unset: optimize_theta
  Normalization normalization = Normalization::variance;
  int threads = 0;
  double split_at = 0.0;
  double support_fraction = 0.05;

  std::vector<CorrelationKind> time_kinds;
  SlotLayout time_slots{-20.0, 20.0, 80};
  std::vector<CorrelationKind> spectral_kinds;
  SlotLayout spectral_slots{-3.2, 3.2, 0};
  /// |Omega| bands [lo, hi] whose opposite-sign extrema are reported separately.
  std::vector<std::pair<double, double>> spectral_bands;

  bool intensity_map = true;
  bool spectra = true;
  int curve_points = 0;  ///< R(zeta) samples; 0 disables the curve

  TemporalGrid grid() const { return TemporalGrid(n_points, tau_min, tau_max); }
  int steps_for(double length) const { return n_steps > 0 ? n_steps : default_steps(length); }
  SlotSpec time_slot_spec() const;
  SlotSpec spectral_slot_spec() const;
  std::vector<std::string> problems() const;
  bool operator==(const RunSettings&) const = default;
};

struct Scenario {
  std::string name;
  std::string caption;
  PhysicsSetup physics;
  RunSettings settings;
};

const std::vector<std::string>& scenario_names();
/// Throws InvalidArgument for an unknown name.
Scenario scenario(std::string_view name);

/// Grid, step and slot adjustments permitted on a preset.
struct ScenarioOverrides {
  std::optional<std::size_t> n_points;
  std::optional<double> tau_min, tau_max;
  std::optional<int> n_steps;
  std::optional<int> checkpoint_stride;
  std::optional<SlotLayout> time_slots, spectral_slots;
  std::optional<int> threads;
  std::optional<int> curve_points;
};

Scenario apply_overrides(Scenario s, const ScenarioOverrides& o);

/// Ordered key/value summary written as "key = value" lines.
class Metrics {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, long long value);
  const std::string* find(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct RunResult {
  Metrics metrics;
  double theta = 0.0;
  double r_min = 1.0;
  bool theta_flat = false;
  std::size_t spectral_maxima = 0;
  std::vector<CorrelationMatrix> time_matrices;
  std::vector<CorrelationMatrix> spectral_matrices;
};

using Progress = std::function<void(std::string_view)>;

/// Validates both halves of the setup (InvalidParameter listing every problem) and propagates.
Trajectory propagate_setup(const PhysicsSetup& physics, const RunSettings& settings, const Progress& progress = {});

/// Grid, energy and spectral-peak metrics; with `out_dir`, also the spectrum, intensity map and
/// output field files. Returns the number of prominent spectral maxima.
std::size_t summarize_classical(const Trajectory& traj, const RunSettings& settings,
                                const std::optional<std::filesystem::path>& out_dir, Metrics& metrics);

/// Propagation, theta selection and every requested measurement; artifacts go to `out_dir`
/// when given.
RunResult run_pipeline(const PhysicsSetup& physics, const RunSettings& settings,
                       const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                       const Progress& progress = {});
/// Same pipeline on an already propagated trajectory.
RunResult run_measurements(const Trajectory& traj, const RunSettings& settings,
                           const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                           const Progress& progress = {});

RunResult run_scenario(std::string_view name, const ScenarioOverrides& overrides = {},
                       const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                       const Progress& progress = {});

/// Coefficient of a physical fiber quantity: base * (1 + sense * depth * shape(z)), with the
/// modulation period in meters.
struct PhysicalCoefficient {
  double base = 0.0;
  ModulationSpec modulation;
  double sense = 1.0;
  bool operator==(const PhysicalCoefficient&) const = default;
};

struct PhysicalParams {
  Model model = Model::manakov;
  double t0 = 0.0;         ///< s
  double beta2_avg = 0.0;  ///< s^2/m, negative for anomalous dispersion
  PhysicalCoefficient beta2{0.0, {}, 1.0};       ///< s^2/m
  PhysicalCoefficient delta_beta1{0.0, {}, 1.0};  ///< beta1x - beta1y, s/m
  PhysicalCoefficient delta_beta{0.0, {}, 1.0};   ///< beta0x - beta0y, 1/m
  double gamma = 0.0;                            ///< 1/(W m)
  double a_eff = 0.0;                            ///< m^2
  double refractive_index = 1.45;
  double length = 0.0;  ///< m
  std::vector<std::string> problems() const;
  bool operator==(const PhysicalParams&) const = default;
};

/// Constants linking physical and normalized variables.
struct ScaleReport {
  double t0 = 0.0;
  double beta2_avg = 0.0;
  double gamma = 0.0;
  double a_eff = 0.0;
  double refractive_index = 0.0;
  double zeta_per_meter = 0.0;     ///< |beta2_avg| / T0^2
  double dispersion_length = 0.0;  ///< T0^2 / |beta2_avg|, m
  double f0 = 0.0;                 ///< c n eps0 A_eff T0^2 gamma / |beta2_avg|
  double soliton_power = 0.0;      ///< |beta2_avg| / (gamma T0^2), W
};

/// D = -beta2 / |beta2_avg|, b = T0^2 dbeta / (2 |beta2_avg|), b1 = T0 dbeta1 / (2 |beta2_avg|),
/// zeta = z |beta2_avg| / T0^2. Throws InvalidParameter on violated invariants.
std::pair<FiberProfile, ScaleReport> normalize(const PhysicalParams& p);
/// Inverse of normalize for a profile expressed with the constants of `scale`.
PhysicalParams denormalize(const FiberProfile& profile, Model model, const ScaleReport& scale);

}  // namespace vsq
