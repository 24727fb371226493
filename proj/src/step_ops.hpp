#pragma once

// Building blocks shared by the classical propagator and the fluctuation engine.
// One step of length h starting at zeta_k is
//   linear(zeta_k + h/4, h/2) -> nonlinear(h) -> linear(zeta_k + 3h/4, h/2),
// and the fluctuation engine linearizes exactly this composition.

#include <array>
#include <span>
#include <vector>

#include "vsq/lattice.hpp"

namespace vsq::detail {

/// Per-bin phase factors exp(i phi(Omega) span) for both polarizations, with
/// phi_x = -b1 Omega - D Omega^2 / 2 + b and phi_y = b1 Omega - D Omega^2 / 2 - b,
/// coefficients sampled at zeta_mid.
struct LinearMultipliers {
  cvec x;
  cvec y;
};

LinearMultipliers linear_multipliers(const TemporalGrid& grid, const FiberProfile& profile, double zeta_mid,
                                     double span);

/// data <- IFFT(mult * FFT(data)); with conjugate = true applies conj(mult), the adjoint.
void apply_spectral(const FftPlan& fft, std::span<cplx> data, std::span<const cplx> mult, bool conjugate = false);

/// Number of RK4 substeps used by the coherent-coupling nonlinear step.
int rk4_substeps(double h);

/// Pointwise nonlinear flow over h. C == 0 is an exact phase rotation; otherwise RK4.
void nonlinear_step(const FiberProfile& profile, double h, std::span<cplx> ux, std::span<cplx> uy);

/// Real 4x4 Jacobian of the pointwise nonlinear map, acting on (Re dx, Im dx, Re dy, Im dy).
/// Row-major.
using Jacobian4 = std::array<double, 16>;

void nonlinear_jacobians(const FiberProfile& profile, double h, std::span<const cplx> wx,
                         std::span<const cplx> wy, std::vector<Jacobian4>& out);

/// v <- J v per sample.
void apply_jacobians(std::span<const Jacobian4> jac, std::span<cplx> vx, std::span<cplx> vy);
/// f <- J^T f per sample.
void apply_jacobians_transposed(std::span<const Jacobian4> jac, std::span<cplx> fx, std::span<cplx> fy);

/// Coefficient sampling points of step k.
inline double first_half_mid(int k, double h) { return (static_cast<double>(k) + 0.25) * h; }
inline double second_half_mid(int k, double h) { return (static_cast<double>(k) + 0.75) * h; }

}  // namespace vsq::detail
