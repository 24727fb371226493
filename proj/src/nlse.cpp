#include "vsq/nlse.hpp"

#include <cmath>
#include <string>

#include "step_ops.hpp"
#include "vsq/error.hpp"

namespace vsq {

int default_steps(double length) { return static_cast<int>(std::ceil(200.0 * length - 1e-9)); }

void advance_classical(PolarizedField& field, const FiberProfile& profile, int k, double h) {
  const auto& grid = field.grid;
  const auto& fft = grid.fft();
  const auto m1 = detail::linear_multipliers(grid, profile, detail::first_half_mid(k, h), 0.5 * h);
  const auto m2 = detail::linear_multipliers(grid, profile, detail::second_half_mid(k, h), 0.5 * h);
  detail::apply_spectral(fft, field.ux, m1.x);
  detail::apply_spectral(fft, field.uy, m1.y);
  detail::nonlinear_step(profile, h, field.ux, field.uy);
  detail::apply_spectral(fft, field.ux, m2.x);
  detail::apply_spectral(fft, field.uy, m2.y);
}

Trajectory::Trajectory(FiberProfile p, int n, double h, int stride, PolarizedField f0)
    : profile_(std::move(p)), n_steps_(n), d_zeta_(h), stride_(stride), final_(f0) {
  checkpoints_.push_back(std::move(f0));
}

PolarizedField Trajectory::state(int k) const {
  if (k < 0 || k > n_steps_) throw InvalidArgument("Trajectory::state: step index out of range");
  if (k == n_steps_) return final_;
  const int c = k / stride_;
  PolarizedField f = checkpoints_[static_cast<std::size_t>(c)];
  for (int s = c * stride_; s < k; ++s) advance_classical(f, profile_, s, d_zeta_);
  return f;
}

void Trajectory::for_each_step_forward(const std::function<void(int, const PolarizedField&)>& fn) const {
  if (stride_ == 1) {
    for (int k = 0; k < n_steps_; ++k) fn(k, checkpoints_[static_cast<std::size_t>(k)]);
    return;
  }
  for (std::size_t c = 0; c < checkpoints_.size(); ++c) {
    PolarizedField f = checkpoints_[c];
    const int begin = checkpoint_step(c);
    const int end = std::min(begin + stride_, n_steps_);
    for (int k = begin; k < end; ++k) {
      fn(k, f);
      if (k + 1 < end) advance_classical(f, profile_, k, d_zeta_);
    }
  }
}

void Trajectory::for_each_step_reverse(const std::function<void(int, const PolarizedField&)>& fn,
                                       int end_step) const {
  const int last = end_step < 0 ? n_steps_ : std::min(end_step, n_steps_);
  if (stride_ == 1) {
    for (int k = last - 1; k >= 0; --k) fn(k, checkpoints_[static_cast<std::size_t>(k)]);
    return;
  }
  // Recompute one segment forward from its checkpoint, then hand it out backwards.
  std::vector<PolarizedField> segment;
  for (std::size_t c = checkpoints_.size(); c-- > 0;) {
    const int begin = checkpoint_step(c);
    const int end = std::min(begin + stride_, last);
    if (begin >= end) continue;
    segment.clear();
    segment.push_back(checkpoints_[c]);
    for (int k = begin; k + 1 < end; ++k) {
      segment.push_back(segment.back());
      advance_classical(segment.back(), profile_, k, d_zeta_);
    }
    for (int k = end - 1; k >= begin; --k) fn(k, segment[static_cast<std::size_t>(k - begin)]);
  }
}

namespace {

bool finite_field(const PolarizedField& f) {
  for (std::size_t j = 0; j < f.ux.size(); ++j)
    if (!std::isfinite(f.ux[j].real()) || !std::isfinite(f.ux[j].imag()) || !std::isfinite(f.uy[j].real()) ||
        !std::isfinite(f.uy[j].imag()))
      return false;
  return true;
}

}  // namespace

Trajectory propagate_classical(const PolarizedField& f0, const FiberProfile& profile, int n_steps,
                               const PropagationOptions& options) {
  profile.validate();
  if (options.checkpoint_stride < 1) throw InvalidParameter("checkpoint stride must be >= 1");
  if (n_steps == 0 && profile.length == 0.0) return Trajectory(profile, 0, 0.0, options.checkpoint_stride, f0);
  if (n_steps < 1) throw InvalidParameter("n_steps must be >= 1");
  if (!(profile.length > 0.0)) throw InvalidParameter("fiber length must be positive");
  if (!finite_field(f0)) throw InvalidParameter("initial field is not finite");

  const double h = profile.length / n_steps;
  Trajectory traj(profile, n_steps, h, options.checkpoint_stride, f0);
  const double peak0 = f0.max_intensity();
  PolarizedField f = f0;
  for (int k = 0; k < n_steps; ++k) {
    advance_classical(f, profile, k, h);
    if (!finite_field(f)) throw NumericalBlowup("classical field became non-finite", k);
    if (peak0 > 0.0 && f.max_intensity() > 1e6 * peak0)
      throw NumericalBlowup("classical peak intensity exceeded 1e6 x initial peak", k);
    if ((k + 1) % traj.stride_ == 0 && k + 1 < n_steps) traj.checkpoints_.push_back(f);
  }
  traj.final_ = std::move(f);
  return traj;
}

rvec field_spectrum(const PolarizedField& f) {
  const cvec sx = spectrum_of(f.grid, f.ux);
  const cvec sy = spectrum_of(f.grid, f.uy);
  rvec s(sx.size());
  for (std::size_t m = 0; m < s.size(); ++m) s[m] = std::norm(sx[m]) + std::norm(sy[m]);
  return to_monotone<double>(s);
}

rvec output_spectrum(const Trajectory& traj) { return field_spectrum(traj.final_field()); }

std::pair<rvec, rvec> split_spectra(const Trajectory& traj, double split_at) {
  const PolarizedField& out = traj.final_field();
  PolarizedField first(out.grid), second(out.grid);
  for (std::size_t j = 0; j < out.grid.size(); ++j) {
    const bool after = out.grid.tau(j) >= split_at;  // H(0) = 1
    (after ? second : first).ux[j] = out.ux[j];
    (after ? second : first).uy[j] = out.uy[j];
  }
  return {field_spectrum(first), field_spectrum(second)};
}

std::vector<std::size_t> prominent_maxima(std::span<const double> y, double min_prominence) {
  std::vector<std::size_t> peaks;
  const std::size_t n = y.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1])) continue;
    // Plateaus count once, at their left edge.
    std::size_t r = i;
    while (r + 1 < n && y[r + 1] == y[i]) ++r;
    if (r + 1 >= n || !(y[r + 1] < y[i])) continue;
    double left_min = y[i];
    for (std::size_t k = i; k-- > 0;) {
      if (y[k] > y[i]) break;
      left_min = std::min(left_min, y[k]);
    }
    double right_min = y[i];
    for (std::size_t k = r + 1; k < n; ++k) {
      if (y[k] > y[i]) break;
      right_min = std::min(right_min, y[k]);
    }
    if (y[i] - std::max(left_min, right_min) >= min_prominence) peaks.push_back(i);
    i = r;
  }
  return peaks;
}

}  // namespace vsq
