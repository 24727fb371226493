#include "vsq/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vsq/error.hpp"

namespace vsq {

TemporalGrid::TemporalGrid(std::size_t n_points, double tau_min, double tau_max)
    : n_(n_points), tau_min_(tau_min), tau_max_(tau_max) {
  if (n_points < 8 || (n_points & (n_points - 1)) != 0)
    throw InvalidParameter("grid size must be a power of two >= 8, got " + std::to_string(n_points));
  if (!std::isfinite(tau_min) || !std::isfinite(tau_max) || !(tau_max > tau_min))
    throw InvalidParameter("grid requires finite tau_max > tau_min");
}

double TemporalGrid::d_omega() const noexcept { return 2.0 * std::numbers::pi / window(); }

double TemporalGrid::omega(std::size_t m) const noexcept {
  const auto k = static_cast<long long>(m);
  const auto n = static_cast<long long>(n_);
  return static_cast<double>(k < n / 2 ? k : k - n) * d_omega();
}

rvec TemporalGrid::taus() const {
  rvec t(n_);
  for (std::size_t j = 0; j < n_; ++j) t[j] = tau(j);
  return t;
}

rvec TemporalGrid::omegas() const {
  rvec w(n_);
  for (std::size_t m = 0; m < n_; ++m) w[m] = omega(m);
  return w;
}

rvec TemporalGrid::omegas_monotone() const {
  const rvec w = omegas();
  return to_monotone<double>(w);
}

const FftPlan& TemporalGrid::fft() const { return *FftPlan::for_size(n_); }

PolarizedField::PolarizedField(TemporalGrid g, cvec x, cvec y) : grid(g), ux(std::move(x)), uy(std::move(y)) {
  if (ux.size() != grid.size() || uy.size() != grid.size())
    throw InvalidArgument("PolarizedField: component length does not match grid");
}

double PolarizedField::energy() const {
  double s = 0.0;
  for (std::size_t j = 0; j < ux.size(); ++j) s += std::norm(ux[j]) + std::norm(uy[j]);
  return s * grid.d_tau();
}

double PolarizedField::max_intensity() const {
  double m = 0.0;
  for (std::size_t j = 0; j < ux.size(); ++j) m = std::max(m, std::norm(ux[j]) + std::norm(uy[j]));
  return m;
}

rvec field_intensity(const PolarizedField& f) {
  rvec out(f.ux.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::norm(f.ux[j]) + std::norm(f.uy[j]);
  return out;
}

cvec spectrum_of(const TemporalGrid& grid, std::span<const cplx> u) {
  cvec s(u.begin(), u.end());
  grid.fft().forward(s);
  // The transform measures time from tau_min; restore the absolute phase and the d_tau weight.
  for (std::size_t m = 0; m < s.size(); ++m)
    s[m] *= grid.d_tau() * std::polar(1.0, -grid.omega(m) * grid.tau_min());
  return s;
}

double ModulationSpec::shape(double zeta) const noexcept {
  switch (kind) {
    case ModulationKind::none:
      return 0.0;
    case ModulationKind::sine:
      return std::sin(2.0 * std::numbers::pi * zeta / period);
    case ModulationKind::truncated_sine:
      return zeta <= period ? std::sin(2.0 * std::numbers::pi * zeta / period) : 0.0;
  }
  return 0.0;
}

void ModulationSpec::validate(const char* what) const {
  if (kind == ModulationKind::none) return;
  if (!std::isfinite(period) || period <= 0.0)
    throw InvalidParameter(std::string(what) + ": modulation period must be positive");
  if (!std::isfinite(depth)) throw InvalidParameter(std::string(what) + ": modulation depth must be finite");
}

FiberProfile FiberProfile::manakov(double length, ModulationSpec dispersion_mod) {
  FiberProfile p;
  p.dispersion.modulation = dispersion_mod;
  p.length = length;
  return p;
}

FiberProfile FiberProfile::birefringent(double length, double b, double b1, ModulationSpec dispersion_mod,
                                        ModulationSpec birefringence_mod, ModulationSpec group_delay_mod) {
  FiberProfile p;
  p.a_coef = 1.0;
  p.b_coef = 2.0 / 3.0;
  p.c_coef = 1.0 / 3.0;
  p.dispersion.modulation = dispersion_mod;
  p.birefringence = {b, birefringence_mod, 1.0};
  p.group_delay = {b1, group_delay_mod, 1.0};
  p.length = length;
  return p;
}

FiberProfile FiberProfile::linear(double length) {
  FiberProfile p;
  p.a_coef = p.b_coef = p.c_coef = 0.0;
  p.length = length;
  return p;
}

void FiberProfile::validate() const {
  if (!std::isfinite(length) || length < 0.0) throw InvalidParameter("fiber length must be finite and >= 0");
  for (double c : {a_coef, b_coef, c_coef, dispersion.base, birefringence.base, group_delay.base})
    if (!std::isfinite(c)) throw InvalidParameter("fiber coefficients must be finite");
  dispersion.modulation.validate("dispersion");
  birefringence.modulation.validate("birefringence");
  group_delay.modulation.validate("group delay");
}

namespace {
double sech(double x) { return 1.0 / std::cosh(x); }

void require_amplitude(double u0) {
  if (!std::isfinite(u0) || u0 <= 0.0) throw InvalidParameter("input amplitude u0 must be positive");
}
}  // namespace

PolarizedField make_initial_single(const TemporalGrid& grid, double u0) {
  require_amplitude(u0);
  PolarizedField f(grid);
  const double amp = u0 / std::numbers::sqrt2;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double v = amp * sech(grid.tau(j));
    f.ux[j] = v;
    f.uy[j] = v;
  }
  return f;
}

PolarizedField make_initial_pair(const TemporalGrid& grid, double u0, double t_sep, double d_omega) {
  require_amplitude(u0);
  if (!std::isfinite(t_sep) || !std::isfinite(d_omega)) throw InvalidParameter("pair offsets must be finite");
  PolarizedField f(grid);
  const double amp = u0 / std::numbers::sqrt2;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.tau(j);
    f.ux[j] = amp * sech(t + t_sep) * std::polar(1.0, d_omega * t);
    f.uy[j] = amp * sech(t - t_sep) * std::polar(1.0, -d_omega * t);
  }
  return f;
}

}  // namespace vsq
