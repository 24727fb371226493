#include "vsq/fluct.hpp"

#include "step_ops.hpp"
#include "vsq/error.hpp"
#include "vsq/parallel.hpp"

namespace vsq {

namespace {

double norm2_of(const TemporalGrid& g, const cvec& x, const cvec& y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += std::norm(x[j]) + std::norm(y[j]);
  return s * g.d_tau();
}

void check_lengths(const TemporalGrid& g, const cvec& x, const cvec& y, const char* what) {
  if (x.size() != g.size() || y.size() != g.size())
    throw InvalidArgument(std::string(what) + ": component length does not match grid");
}

// Classical state at the nonlinear substep of step k, and the substep Jacobians there.
struct StepCoefficients {
  detail::LinearMultipliers first;
  detail::LinearMultipliers second;
  std::vector<detail::Jacobian4> jac;

  void load(const Trajectory& traj, int k, const PolarizedField& state) {
    const auto& grid = traj.grid();
    const double h = traj.d_zeta();
    first = detail::linear_multipliers(grid, traj.profile(), detail::first_half_mid(k, h), 0.5 * h);
    second = detail::linear_multipliers(grid, traj.profile(), detail::second_half_mid(k, h), 0.5 * h);
    cvec wx = state.ux, wy = state.uy;
    detail::apply_spectral(grid.fft(), wx, first.x);
    detail::apply_spectral(grid.fft(), wy, first.y);
    detail::nonlinear_jacobians(traj.profile(), h, wx, wy, jac);
  }
};

void backward_chunk(std::span<AdjointField> fields, const Trajectory& traj, int end_step) {
  const auto& fft = traj.grid().fft();
  StepCoefficients co;
  traj.for_each_step_reverse([&](int k, const PolarizedField& state) {
    co.load(traj, k, state);
    for (auto& f : fields) {
      detail::apply_spectral(fft, f.fx, co.second.x, true);
      detail::apply_spectral(fft, f.fy, co.second.y, true);
      detail::apply_jacobians_transposed(co.jac, f.fx, f.fy);
      detail::apply_spectral(fft, f.fx, co.first.x, true);
      detail::apply_spectral(fft, f.fy, co.first.y, true);
    }
  }, end_step);
}

}  // namespace

AdjointField::AdjointField(TemporalGrid g, cvec x, cvec y) : grid(g), fx(std::move(x)), fy(std::move(y)) {
  check_lengths(grid, fx, fy, "AdjointField");
}

double AdjointField::norm2() const { return norm2_of(grid, fx, fy); }

PerturbationField::PerturbationField(TemporalGrid g, cvec x, cvec y) : grid(g), vx(std::move(x)), vy(std::move(y)) {
  check_lengths(grid, vx, vy, "PerturbationField");
}

double PerturbationField::norm2() const { return norm2_of(grid, vx, vy); }

cplx inner_product(const AdjointField& a, const PerturbationField& v) {
  if (!(a.grid == v.grid)) throw InvalidArgument("inner_product: grid mismatch");
  cplx s = 0.0;
  for (std::size_t j = 0; j < a.fx.size(); ++j) {
    s += a.fx[j] * std::conj(v.vx[j]) + std::conj(a.fx[j]) * v.vx[j];
    s += a.fy[j] * std::conj(v.vy[j]) + std::conj(a.fy[j]) * v.vy[j];
  }
  return 0.5 * s * a.grid.d_tau();
}

double real_overlap(const AdjointField& a, const AdjointField& b) {
  if (!(a.grid == b.grid)) throw InvalidArgument("real_overlap: grid mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < a.fx.size(); ++j) {
    s += a.fx[j].real() * b.fx[j].real() + a.fx[j].imag() * b.fx[j].imag();
    s += a.fy[j].real() * b.fy[j].real() + a.fy[j].imag() * b.fy[j].imag();
  }
  return s * a.grid.d_tau();
}

PerturbationField propagate_fluctuation(const PerturbationField& v0, const Trajectory& traj) {
  if (!(v0.grid == traj.grid())) throw InvalidArgument("propagate_fluctuation: grid mismatch with trajectory");
  PerturbationField v = v0;
  const auto& fft = traj.grid().fft();
  const double peak0 = std::max(v0.norm2(), 1e-300);
  StepCoefficients co;
  traj.for_each_step_forward([&](int k, const PolarizedField& state) {
    co.load(traj, k, state);
    detail::apply_spectral(fft, v.vx, co.first.x);
    detail::apply_spectral(fft, v.vy, co.first.y);
    detail::apply_jacobians(co.jac, v.vx, v.vy);
    detail::apply_spectral(fft, v.vx, co.second.x);
    detail::apply_spectral(fft, v.vy, co.second.y);
    const double n2 = v.norm2();
    if (!std::isfinite(n2) || n2 > 1e12 * peak0) throw NumericalBlowup("fluctuation field diverged", k);
  });
  return v;
}

std::vector<AdjointField> backpropagate_adjoint(std::span<const AdjointField> fields, const Trajectory& traj,
                                                int threads) {
  return backpropagate_adjoint_from(fields, traj, traj.n_steps(), threads);
}

std::vector<AdjointField> backpropagate_adjoint_from(std::span<const AdjointField> fields, const Trajectory& traj,
                                                     int end_step, int threads) {
  if (end_step < 0 || end_step > traj.n_steps()) throw InvalidArgument("backpropagate_adjoint: bad end step");
  for (const auto& f : fields)
    if (!(f.grid == traj.grid())) throw InvalidArgument("backpropagate_adjoint: grid mismatch with trajectory");
  std::vector<AdjointField> out(fields.begin(), fields.end());
  parallel_chunks(out.size(), resolve_threads(threads), [&](std::size_t begin, std::size_t end) {
    backward_chunk(std::span<AdjointField>(out).subspan(begin, end - begin), traj, end_step);
  });
  for (const auto& f : out)
    if (!std::isfinite(f.norm2())) throw NumericalBlowup("adjoint field diverged", 0);
  return out;
}

AdjointField backpropagate_adjoint(const AdjointField& fL, const Trajectory& traj) {
  return std::move(backpropagate_adjoint(std::span<const AdjointField>(&fL, 1), traj, 1).front());
}

}  // namespace vsq
