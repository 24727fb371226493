#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "vsq/fft.hpp"

namespace vsq {

using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

/// Uniform periodic retarded-time grid tau_j = tau_min + j * d_tau, j = 0..n-1.
///
/// Spectral bins follow the discrete-transform ordering: bin m holds
/// Omega_m = m * d_omega for m < n/2 and (m - n) * d_omega otherwise, with
/// d_omega = 2 pi / (tau_max - tau_min). A field sample U_j is recovered as
/// (1/n) sum_m c_m exp(i Omega_m (tau_j - tau_min)), so d/dtau acts as i Omega.
class TemporalGrid {
 public:
  /// Throws InvalidParameter unless n_points >= 8 is a power of two and tau_max > tau_min.
  TemporalGrid(std::size_t n_points, double tau_min, double tau_max);

  /// tau in [-20, 20), 4096 points.
  static TemporalGrid standard() { return TemporalGrid(4096, -20.0, 20.0); }

  std::size_t size() const noexcept { return n_; }
  double tau_min() const noexcept { return tau_min_; }
  double tau_max() const noexcept { return tau_max_; }
  double window() const noexcept { return tau_max_ - tau_min_; }
  double d_tau() const noexcept { return window() / static_cast<double>(n_); }
  double d_omega() const noexcept;

  double tau(std::size_t j) const noexcept { return tau_min_ + static_cast<double>(j) * d_tau(); }
  double omega(std::size_t m) const noexcept;

  rvec taus() const;
  /// Spectral bins in transform order.
  rvec omegas() const;
  /// Spectral bins in increasing order (see to_monotone()).
  rvec omegas_monotone() const;

  const FftPlan& fft() const;

  bool operator==(const TemporalGrid& o) const noexcept {
    return n_ == o.n_ && tau_min_ == o.tau_min_ && tau_max_ == o.tau_max_;
  }

 private:
  std::size_t n_;
  double tau_min_;
  double tau_max_;
};

/// Reorders an array from transform order to increasing-Omega order (fftshift).
template <typename T>
std::vector<T> to_monotone(std::span<const T> transform_order) {
  const std::size_t n = transform_order.size();
  std::vector<T> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = transform_order[(k + n / 2) % n];
  return out;
}

/// Pair of normalized envelopes (U_x, U_y) sampled on a grid.
struct PolarizedField {
  TemporalGrid grid;
  cvec ux;
  cvec uy;

  explicit PolarizedField(TemporalGrid g) : grid(g), ux(g.size()), uy(g.size()) {}
  PolarizedField(TemporalGrid g, cvec x, cvec y);

  /// E = integral of (|U_x|^2 + |U_y|^2) d tau (rectangle rule, exact for the periodic grid).
  double energy() const;
  double max_intensity() const;
};

/// |U_x|^2 + |U_y|^2 pointwise.
rvec field_intensity(const PolarizedField& f);

/// Spectral amplitude F[u](Omega_m) = d_tau * sum_j u_j exp(-i Omega_m tau_j), transform order.
cvec spectrum_of(const TemporalGrid& grid, std::span<const cplx> u);

enum class ModulationKind { none, sine, truncated_sine };

/// Periodic modulation shape along the fiber.
///
/// shape(z) = sin(2 pi z / period) for sine; the same for z <= period and 0 afterwards
/// for truncated_sine; 0 for none. A coefficient built from it is
/// base * (1 + sense * depth * shape(z)); the dispersion uses sense = -1, giving
/// D = 1 - depth sin(...), while birefringence and group delay use sense = +1.
struct ModulationSpec {
  ModulationKind kind = ModulationKind::none;
  double period = 0.0;
  double depth = 0.0;

  static ModulationSpec none() { return {}; }
  static ModulationSpec sine(double period, double depth) { return {ModulationKind::sine, period, depth}; }
  static ModulationSpec truncated_sine(double period, double depth) {
    return {ModulationKind::truncated_sine, period, depth};
  }

  double shape(double zeta) const noexcept;
  /// Throws InvalidParameter for a non-positive or non-finite period on a modulated spec.
  void validate(const char* what) const;
  bool operator==(const ModulationSpec&) const = default;
};

struct ModulatedCoefficient {
  double base = 0.0;
  ModulationSpec modulation;
  double sense = 1.0;

  double at(double zeta) const noexcept { return base * (1.0 + sense * modulation.depth * modulation.shape(zeta)); }
  bool operator==(const ModulatedCoefficient&) const = default;
};

/// Coefficients of the coupled NLS system and the fiber extent.
struct FiberProfile {
  double a_coef = 8.0 / 9.0;
  double b_coef = 8.0 / 9.0;
  double c_coef = 0.0;
  ModulatedCoefficient dispersion{1.0, {}, -1.0};
  ModulatedCoefficient birefringence{0.0, {}, 1.0};
  ModulatedCoefficient group_delay{0.0, {}, 1.0};
  double length = 0.0;

  /// A = B = 8/9, C = 0, b = b1 = 0; D = 1 - depth sin(2 pi zeta / period).
  static FiberProfile manakov(double length, ModulationSpec dispersion_mod = {});
  /// A = 1, B = 2/3, C = 1/3 with base birefringence b and group delay b1.
  static FiberProfile birefringent(double length, double b, double b1, ModulationSpec dispersion_mod = {},
                                   ModulationSpec birefringence_mod = {}, ModulationSpec group_delay_mod = {});
  /// A = B = C = 0, D = 1: pure dispersion.
  static FiberProfile linear(double length);

  double d(double zeta) const noexcept { return dispersion.at(zeta); }
  double b(double zeta) const noexcept { return birefringence.at(zeta); }
  double b1(double zeta) const noexcept { return group_delay.at(zeta); }
  bool has_coherent_coupling() const noexcept { return c_coef != 0.0; }

  void validate() const;
  bool operator==(const FiberProfile&) const = default;
};

/// U_x = U_y = (u0 / sqrt 2) sech(tau).
PolarizedField make_initial_single(const TemporalGrid& grid, double u0);

/// U_x = (u0/sqrt 2) sech(tau + T) e^{i dw tau}, U_y = (u0/sqrt 2) sech(tau - T) e^{-i dw tau}.
PolarizedField make_initial_pair(const TemporalGrid& grid, double u0, double t_sep, double d_omega);

}  // namespace vsq
