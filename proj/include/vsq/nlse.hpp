#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "vsq/lattice.hpp"

namespace vsq {

/// ceil(200 L): about 5e-3 per step.
int default_steps(double length);

struct PropagationOptions {
  /// 1 stores every step; K > 1 stores every K-th state and recomputes the rest on demand.
  int checkpoint_stride = 1;
};

/// Classical solution of the coupled NLS system at zeta_k = k * d_zeta, k = 0..n_steps.
///
/// Immutable once built; the fluctuation engine walks it forwards or backwards and may
/// do so from several threads at once.
class Trajectory {
 public:
  const FiberProfile& profile() const noexcept { return profile_; }
  const TemporalGrid& grid() const noexcept { return initial().grid; }
  int n_steps() const noexcept { return n_steps_; }
  double d_zeta() const noexcept { return d_zeta_; }
  int checkpoint_stride() const noexcept { return stride_; }
  double length() const noexcept { return profile_.length; }

  const PolarizedField& initial() const { return checkpoints_.front(); }
  const PolarizedField& final_field() const { return final_; }

  /// State at zeta_k, recomputed from the preceding checkpoint when it is not stored.
  PolarizedField state(int k) const;

  /// Calls fn(k, U(zeta_k)) for k = 0 .. n_steps - 1, i.e. the state entering step k.
  void for_each_step_forward(const std::function<void(int, const PolarizedField&)>& fn) const;
  /// Same states in order k = end - 1 .. 0 (end < 0 means n_steps).
  void for_each_step_reverse(const std::function<void(int, const PolarizedField&)>& fn, int end = -1) const;

  /// Stored checkpoints with their step indices (every step when stride == 1).
  const std::vector<PolarizedField>& checkpoints() const noexcept { return checkpoints_; }
  int checkpoint_step(std::size_t i) const noexcept { return static_cast<int>(i) * stride_; }

 private:
  friend Trajectory propagate_classical(const PolarizedField&, const FiberProfile&, int, const PropagationOptions&);
  Trajectory(FiberProfile p, int n, double h, int stride, PolarizedField f0);

  FiberProfile profile_;
  int n_steps_;
  double d_zeta_;
  int stride_;
  std::vector<PolarizedField> checkpoints_;
  PolarizedField final_;
};

/// Advances `field` by step k of length h (symmetric linear / nonlinear / linear splitting).
void advance_classical(PolarizedField& field, const FiberProfile& profile, int k, double h);

/// Integrates the coupled NLS system from zeta = 0 to profile.length in n_steps steps.
///
/// n_steps == 0 is accepted only together with length == 0 and yields the one-state
/// trajectory. Throws NumericalBlowup naming the step when a state turns non-finite
/// or its peak intensity exceeds 1e6 times the initial peak.
Trajectory propagate_classical(const PolarizedField& f0, const FiberProfile& profile, int n_steps,
                               const PropagationOptions& options = {});

/// I(Omega) = |F[U_x]|^2 + |F[U_y]|^2 of a field, increasing-Omega order.
rvec field_spectrum(const PolarizedField& f);

/// Output spectrum at zeta = L, increasing-Omega order (pair with grid().omegas_monotone()).
rvec output_spectrum(const Trajectory& traj);

/// Spectra of the output field masked by 1 - H(tau - split_at) and by H(tau - split_at).
std::pair<rvec, rvec> split_spectra(const Trajectory& traj, double split_at);

/// Indices of interior local maxima whose topographic prominence (height above the
/// higher of the two lowest points reached before meeting a taller sample on either
/// side) is at least `min_prominence`.
std::vector<std::size_t> prominent_maxima(std::span<const double> y, double min_prominence);

}  // namespace vsq
