#include "step_ops.hpp"

#include <cmath>

namespace vsq::detail {

LinearMultipliers linear_multipliers(const TemporalGrid& grid, const FiberProfile& profile, double zeta_mid,
                                     double span) {
  const double d = profile.d(zeta_mid);
  const double b = profile.b(zeta_mid);
  const double b1 = profile.b1(zeta_mid);
  LinearMultipliers m{cvec(grid.size()), cvec(grid.size())};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = grid.omega(k);
    const double disp = -0.5 * d * w * w;
    m.x[k] = std::polar(1.0, (disp - b1 * w + b) * span);
    m.y[k] = std::polar(1.0, (disp + b1 * w - b) * span);
  }
  return m;
}

void apply_spectral(const FftPlan& fft, std::span<cplx> data, std::span<const cplx> mult, bool conjugate) {
  fft.forward(data);
  if (conjugate) {
    for (std::size_t k = 0; k < data.size(); ++k) data[k] *= std::conj(mult[k]);
  } else {
    for (std::size_t k = 0; k < data.size(); ++k) data[k] *= mult[k];
  }
  fft.inverse(data);
}

int rk4_substeps(double h) {
  constexpr double max_substep = 1e-3;
  if (h <= max_substep) return 1;
  return static_cast<int>(std::ceil(h / max_substep - 1e-9));
}

namespace {

const cplx I{0.0, 1.0};

struct Pair {
  cplx x, y;
};

struct Coupling {
  double a, b, c;

  Pair rhs(const Pair& s) const {
    const double nx = std::norm(s.x), ny = std::norm(s.y);
    return {I * ((a * nx + b * ny) * s.x + c * s.y * s.y * std::conj(s.x)),
            I * ((a * ny + b * nx) * s.y + c * s.x * s.x * std::conj(s.y))};
  }

  // Linearization of rhs at s applied to d.
  Pair tangent(const Pair& s, const Pair& d) const {
    const double nx = std::norm(s.x), ny = std::norm(s.y);
    const cplx dx = I * ((2.0 * a * nx + b * ny) * d.x + (a * s.x * s.x + c * s.y * s.y) * std::conj(d.x) +
                         (2.0 * c * std::conj(s.x) * s.y + b * s.x * std::conj(s.y)) * d.y +
                         b * s.x * s.y * std::conj(d.y));
    const cplx dy = I * ((2.0 * a * ny + b * nx) * d.y + (a * s.y * s.y + c * s.x * s.x) * std::conj(d.y) +
                         (2.0 * c * std::conj(s.y) * s.x + b * s.y * std::conj(s.x)) * d.x +
                         b * s.x * s.y * std::conj(d.x));
    return {dx, dy};
  }
};

Pair axpy(const Pair& s, double h, const Pair& k) { return {s.x + h * k.x, s.y + h * k.y}; }

Pair rk4(const Coupling& cp, Pair s, double h, int substeps) {
  const double dt = h / substeps;
  for (int n = 0; n < substeps; ++n) {
    const Pair k1 = cp.rhs(s);
    const Pair k2 = cp.rhs(axpy(s, 0.5 * dt, k1));
    const Pair k3 = cp.rhs(axpy(s, 0.5 * dt, k2));
    const Pair k4 = cp.rhs(axpy(s, dt, k3));
    s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.y += dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
  }
  return s;
}

// Jacobian of the RK4 map, propagated column by column alongside the state.
Jacobian4 rk4_jacobian(const Coupling& cp, Pair s, double h, int substeps) {
  std::array<Pair, 4> cols{Pair{1.0, 0.0}, Pair{I, 0.0}, Pair{0.0, 1.0}, Pair{0.0, I}};
  const double dt = h / substeps;
  for (int n = 0; n < substeps; ++n) {
    const Pair k1 = cp.rhs(s);
    const Pair s2 = axpy(s, 0.5 * dt, k1);
    const Pair k2 = cp.rhs(s2);
    const Pair s3 = axpy(s, 0.5 * dt, k2);
    const Pair k3 = cp.rhs(s3);
    const Pair s4 = axpy(s, dt, k3);
    const Pair k4 = cp.rhs(s4);
    for (auto& d : cols) {
      const Pair d1 = cp.tangent(s, d);
      const Pair d2 = cp.tangent(s2, axpy(d, 0.5 * dt, d1));
      const Pair d3 = cp.tangent(s3, axpy(d, 0.5 * dt, d2));
      const Pair d4 = cp.tangent(s4, axpy(d, dt, d3));
      d.x += dt / 6.0 * (d1.x + 2.0 * d2.x + 2.0 * d3.x + d4.x);
      d.y += dt / 6.0 * (d1.y + 2.0 * d2.y + 2.0 * d3.y + d4.y);
    }
    s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.y += dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
  }
  Jacobian4 j{};
  for (int c = 0; c < 4; ++c) {
    j[0 * 4 + c] = cols[c].x.real();
    j[1 * 4 + c] = cols[c].x.imag();
    j[2 * 4 + c] = cols[c].y.real();
    j[3 * 4 + c] = cols[c].y.imag();
  }
  return j;
}

// Exact phase-rotation map for C == 0 and its Jacobian.
Jacobian4 rotation_jacobian(double a, double b, double h, cplx x, cplx y) {
  const double phx = h * (a * std::norm(x) + b * std::norm(y));
  const double phy = h * (a * std::norm(y) + b * std::norm(x));
  const double cx = std::cos(phx), sx = std::sin(phx);
  const double cy = std::cos(phy), sy = std::sin(phy);
  const cplx xo = x * cplx(cx, sx);
  const cplx yo = y * cplx(cy, sy);
  // d phi_x = gx . v, d phi_y = gy . v
  const std::array<double, 4> gx{2 * h * a * x.real(), 2 * h * a * x.imag(), 2 * h * b * y.real(),
                                 2 * h * b * y.imag()};
  const std::array<double, 4> gy{2 * h * b * x.real(), 2 * h * b * x.imag(), 2 * h * a * y.real(),
                                 2 * h * a * y.imag()};
  Jacobian4 j{};
  j[0] = cx;
  j[1] = -sx;
  j[4] = sx;
  j[5] = cx;
  j[10] = cy;
  j[11] = -sy;
  j[14] = sy;
  j[15] = cy;
  for (int c = 0; c < 4; ++c) {
    j[0 * 4 + c] += -xo.imag() * gx[c];
    j[1 * 4 + c] += xo.real() * gx[c];
    j[2 * 4 + c] += -yo.imag() * gy[c];
    j[3 * 4 + c] += yo.real() * gy[c];
  }
  return j;
}

}  // namespace

void nonlinear_step(const FiberProfile& profile, double h, std::span<cplx> ux, std::span<cplx> uy) {
  const double a = profile.a_coef, b = profile.b_coef;
  if (!profile.has_coherent_coupling()) {
    for (std::size_t j = 0; j < ux.size(); ++j) {
      const double nx = std::norm(ux[j]), ny = std::norm(uy[j]);
      ux[j] *= std::polar(1.0, h * (a * nx + b * ny));
      uy[j] *= std::polar(1.0, h * (a * ny + b * nx));
    }
    return;
  }
  const Coupling cp{a, b, profile.c_coef};
  const int substeps = rk4_substeps(h);
  for (std::size_t j = 0; j < ux.size(); ++j) {
    const Pair s = rk4(cp, {ux[j], uy[j]}, h, substeps);
    ux[j] = s.x;
    uy[j] = s.y;
  }
}

void nonlinear_jacobians(const FiberProfile& profile, double h, std::span<const cplx> wx,
                         std::span<const cplx> wy, std::vector<Jacobian4>& out) {
  out.resize(wx.size());
  if (!profile.has_coherent_coupling()) {
    for (std::size_t j = 0; j < wx.size(); ++j)
      out[j] = rotation_jacobian(profile.a_coef, profile.b_coef, h, wx[j], wy[j]);
    return;
  }
  const Coupling cp{profile.a_coef, profile.b_coef, profile.c_coef};
  const int substeps = rk4_substeps(h);
  for (std::size_t j = 0; j < wx.size(); ++j) out[j] = rk4_jacobian(cp, {wx[j], wy[j]}, h, substeps);
}

void apply_jacobians(std::span<const Jacobian4> jac, std::span<cplx> vx, std::span<cplx> vy) {
  for (std::size_t j = 0; j < jac.size(); ++j) {
    const auto& m = jac[j];
    const double v[4] = {vx[j].real(), vx[j].imag(), vy[j].real(), vy[j].imag()};
    double r[4];
    for (int row = 0; row < 4; ++row)
      r[row] = m[row * 4 + 0] * v[0] + m[row * 4 + 1] * v[1] + m[row * 4 + 2] * v[2] + m[row * 4 + 3] * v[3];
    vx[j] = {r[0], r[1]};
    vy[j] = {r[2], r[3]};
  }
}

void apply_jacobians_transposed(std::span<const Jacobian4> jac, std::span<cplx> fx, std::span<cplx> fy) {
  for (std::size_t j = 0; j < jac.size(); ++j) {
    const auto& m = jac[j];
    const double f[4] = {fx[j].real(), fx[j].imag(), fy[j].real(), fy[j].imag()};
    double r[4];
    for (int col = 0; col < 4; ++col)
      r[col] = m[0 * 4 + col] * f[0] + m[1 * 4 + col] * f[1] + m[2 * 4 + col] * f[2] + m[3 * 4 + col] * f[3];
    fx[j] = {r[0], r[1]};
    fy[j] = {r[2], r[3]};
  }
}

}  // namespace vsq::detail
