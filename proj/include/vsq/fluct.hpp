#pragma once

#include <span>
#include <vector>

#include "vsq/lattice.hpp"
#include "vsq/nlse.hpp"

namespace vsq {

/// Adjoint vector (f_x, f_x*, f_y, f_y*); only f_x and f_y are stored.
struct AdjointField {
  TemporalGrid grid;
  cvec fx;
  cvec fy;

  explicit AdjointField(TemporalGrid g) : grid(g), fx(g.size()), fy(g.size()) {}
  AdjointField(TemporalGrid g, cvec x, cvec y);

  /// Integral of |f_x|^2 + |f_y|^2 d tau.
  double norm2() const;
};

/// c-number stand-in for the fluctuation operators (u_x, u_y).
struct PerturbationField {
  TemporalGrid grid;
  cvec vx;
  cvec vy;

  explicit PerturbationField(TemporalGrid g) : grid(g), vx(g.size()), vy(g.size()) {}
  PerturbationField(TemporalGrid g, cvec x, cvec y);

  /// Integral of |v_x|^2 + |v_y|^2 d tau.
  double norm2() const;
};

/// <a|v> = (1/2) integral (f_x v_x* + f_x* v_x + f_y v_y* + f_y* v_y) d tau.
///
/// For c-number arguments the value is Re integral (f_x* v_x + f_y* v_y) d tau and the
/// imaginary part cancels term by term; callers asserting realness should still allow
/// |imag| < 1e-10. Throws InvalidArgument on grid mismatch.
cplx inner_product(const AdjointField& a, const PerturbationField& v);

/// Same real inner product between two adjoint-shaped fields.
double real_overlap(const AdjointField& a, const AdjointField& b);

/// Propagates a perturbation from zeta = 0 to L with the tangent-linear of the discrete
/// classical step (same splitting, same step size, same coefficient sampling).
PerturbationField propagate_fluctuation(const PerturbationField& v0, const Trajectory& traj);

/// Backpropagates an adjoint field from zeta = L to 0 by applying, in reverse order, the
/// transpose (w.r.t. inner_product) of every forward substep. Duality
///   <backpropagate_adjoint(f), v> == <f, propagate_fluctuation(v)>
/// holds to round-off.
AdjointField backpropagate_adjoint(const AdjointField& fL, const Trajectory& traj);

/// Backpropagates several adjoint fields over one trajectory. Fields are split into
/// contiguous chunks, one per worker; each result is bitwise identical to the
/// single-field call regardless of `threads` (0 = hardware concurrency).
std::vector<AdjointField> backpropagate_adjoint(std::span<const AdjointField> fields, const Trajectory& traj,
                                                int threads = 0);

/// Backpropagates fields given at zeta_k (k = end_step) down to zeta = 0.
std::vector<AdjointField> backpropagate_adjoint_from(std::span<const AdjointField> fields, const Trajectory& traj,
                                                     int end_step, int threads = 0);

}  // namespace vsq
