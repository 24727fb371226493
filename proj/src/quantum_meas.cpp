#include "vsq/quantum_meas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vsq/error.hpp"
#include "vsq/parallel.hpp"

namespace vsq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaskFraction = 1e-12;

AdjointField lo_from(const PolarizedField& u, double theta) {
  const cplx phase = std::polar(1.0, theta);
  AdjointField f(u.grid);
  for (std::size_t j = 0; j < u.ux.size(); ++j) {
    f.fx[j] = u.ux[j] * phase;
    f.fy[j] = u.uy[j] * phase;
  }
  return f;
}

void require_energy(double e) {
  if (!(e > 0.0)) throw UndefinedMeasurement("output field has zero energy");
}

// (1/2) sum (f g* + f* g) d tau, kept complex so the imaginary residue can be watched.
cplx complex_overlap(const AdjointField& a, const AdjointField& b) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < a.fx.size(); ++j) {
    s += a.fx[j] * std::conj(b.fx[j]) + std::conj(a.fx[j]) * b.fx[j];
    s += a.fy[j] * std::conj(b.fy[j]) + std::conj(a.fy[j]) * b.fy[j];
  }
  return 0.5 * s * a.grid.d_tau();
}

// Re sum conj(s_i) s_j d_tau / n over transform bins: the Parseval image of real_overlap.
double spectral_overlap(const TemporalGrid& g, const cvec& ax, const cvec& ay, const cvec& bx, const cvec& by) {
  double s = 0.0;
  for (std::size_t m = 0; m < ax.size(); ++m) {
    s += ax[m].real() * bx[m].real() + ax[m].imag() * bx[m].imag();
    s += ay[m].real() * by[m].real() + ay[m].imag() * by[m].imag();
  }
  return s * g.d_tau() / static_cast<double>(g.size());
}

bool in_window(double t, double center, double width, double eps) {
  return t >= center - 0.5 * width - eps && t < center + 0.5 * width - eps;
}

}  // namespace

AdjointField make_lo(const Trajectory& traj, double theta) { return lo_from(traj.final_field(), theta); }

double squeezing_ratio(const Trajectory& traj, double theta, int threads) {
  const AdjointField lo = make_lo(traj, theta);
  const double denom = lo.norm2();
  require_energy(denom);
  std::vector<AdjointField> in{lo};
  return backpropagate_adjoint(in, traj, threads).front().norm2() / denom;
}

SqueezingLandscape::SqueezingLandscape(const Trajectory& traj, int threads) {
  energy_ = traj.final_field().energy();
  require_energy(energy_);
  std::vector<AdjointField> in{make_lo(traj, 0.0), make_lo(traj, 0.5 * std::numbers::pi)};
  const auto out = backpropagate_adjoint(in, traj, threads);
  aa_ = out[0].norm2();
  bb_ = out[1].norm2();
  ab_ = real_overlap(out[0], out[1]);
}

double SqueezingLandscape::operator()(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return (c * c * aa_ + s * s * bb_ + 2.0 * s * c * ab_) / energy_;
}

ThetaOptimum optimize_theta(const SqueezingLandscape& landscape) {
  constexpr int kScan = 720;
  const double step = kTwoPi / kScan;
  std::vector<double> r(kScan);
  for (int i = 0; i < kScan; ++i) r[static_cast<std::size_t>(i)] = landscape(i * step);
  const auto [lo_it, hi_it] = std::minmax_element(r.begin(), r.end());
  const int best = static_cast<int>(lo_it - r.begin());

  ThetaOptimum opt;
  opt.theta = best * step;
  opt.r_min = *lo_it;
  opt.flat = (*hi_it - *lo_it) < 1e-12;
  if (opt.flat) return opt;

  const double rm = r[static_cast<std::size_t>((best + kScan - 1) % kScan)];
  const double rp = r[static_cast<std::size_t>((best + 1) % kScan)];
  const double curvature = rm - 2.0 * opt.r_min + rp;
  if (curvature > 0.0) {
    const double offset = 0.5 * (rm - rp) / curvature;  // in units of step, |offset| <= 1/2
    const double theta = opt.theta + offset * step;
    const double refined = landscape(theta);
    if (refined <= opt.r_min) {
      opt.theta = std::fmod(theta + kTwoPi, kTwoPi);
      opt.r_min = refined;
    }
  }
  return opt;
}

ThetaOptimum optimize_theta(const Trajectory& traj, int threads) {
  return optimize_theta(SqueezingLandscape(traj, threads));
}

std::vector<std::pair<double, double>> squeezing_curve(const Trajectory& traj, int points, int threads) {
  if (points < 1) throw InvalidParameter("squeezing curve needs at least one point");
  std::vector<std::pair<double, double>> curve;
  curve.emplace_back(0.0, 1.0);
  for (int p = 1; p <= points; ++p) {
    const int k = static_cast<int>(std::lround(static_cast<double>(p) * traj.n_steps() / points));
    if (k <= 0) continue;
    const PolarizedField u = traj.state(k);
    const double e = u.energy();
    require_energy(e);
    std::vector<AdjointField> in{lo_from(u, 0.0), lo_from(u, 0.5 * std::numbers::pi)};
    const auto out = backpropagate_adjoint_from(in, traj, k, threads);
    const double aa = out[0].norm2(), bb = out[1].norm2(), ab = real_overlap(out[0], out[1]);
    // Closed-form minimum of (P + Q cos 2t + S sin 2t) / E.
    const double mean = 0.5 * (aa + bb), half = 0.5 * (aa - bb);
    curve.emplace_back(k * traj.d_zeta(), (mean - std::hypot(half, ab)) / e);
  }
  return curve;
}

SlotSpec SlotSpec::uniform(SlotDomain domain, double lo, double hi, int count, Polarization pol) {
  if (count < 1 || !(hi > lo)) throw InvalidParameter("uniform slots need count >= 1 and hi > lo");
  SlotSpec s;
  s.domain = domain;
  s.polarization = pol;
  s.width = (hi - lo) / count;
  for (int i = 0; i < count; ++i) s.centers.push_back(lo + (i + 0.5) * s.width);
  return s;
}

SlotSpec SlotSpec::frequency_bins(const TemporalGrid& grid, int m_lo, int m_hi, Polarization pol) {
  if (m_hi <= m_lo) throw InvalidParameter("frequency_bins needs m_hi > m_lo");
  SlotSpec s;
  s.domain = SlotDomain::frequency;
  s.polarization = pol;
  s.width = grid.d_omega();
  for (int m = m_lo; m < m_hi; ++m) s.centers.push_back(m * grid.d_omega());
  return s;
}

void SlotSpec::validate(const TemporalGrid& grid) const {
  if (centers.empty()) throw InvalidParameter("slot list is empty");
  const double resolution = domain == SlotDomain::time ? grid.d_tau() : grid.d_omega();
  if (!std::isfinite(width) || width < resolution * (1.0 - 1e-12))
    throw InvalidParameter("slot width is below the grid resolution");
  for (std::size_t i = 1; i < centers.size(); ++i) {
    if (!(centers[i] > centers[i - 1])) throw InvalidParameter("slot centers must be strictly increasing");
    if (centers[i] - centers[i - 1] < width - 1e-12) throw InvalidParameter("slots overlap");
  }
}

FilteredLo filtered_lo(const Trajectory& traj, double theta, SlotDomain domain, double center, double width,
                       Polarization polarization) {
  const PolarizedField& u = traj.final_field();
  const TemporalGrid& g = u.grid;
  const bool keep_x = polarization != Polarization::y;
  const bool keep_y = polarization != Polarization::x;
  const cplx phase = std::polar(1.0, theta);
  FilteredLo out{AdjointField(g), {}, {}, true};

  if (domain == SlotDomain::time) {
    const double eps = 1e-9 * g.d_tau();
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!in_window(g.tau(j), center, width, eps)) continue;
      out.empty = false;
      if (keep_x) out.field.fx[j] = u.ux[j] * phase;
      if (keep_y) out.field.fy[j] = u.uy[j] * phase;
    }
    return out;
  }

  cvec sx = u.ux, sy = u.uy;
  g.fft().forward(sx);
  g.fft().forward(sy);
  const double eps = 1e-9 * g.d_omega();
  for (std::size_t m = 0; m < g.size(); ++m) {
    const bool inside = in_window(g.omega(m), center, width, eps);
    out.empty = out.empty && !inside;
    if (!inside || !keep_x) sx[m] = 0.0;
    if (!inside || !keep_y) sy[m] = 0.0;
  }
  out.spectrum_x = sx;
  out.spectrum_y = sy;
  g.fft().inverse(sx);
  g.fft().inverse(sy);
  for (std::size_t j = 0; j < g.size(); ++j) {
    out.field.fx[j] = sx[j] * phase;
    out.field.fy[j] = sy[j] * phase;
  }
  return out;
}

CorrelationKind parse_correlation_kind(std::string_view s) {
  if (s == "xx") return CorrelationKind::xx;
  if (s == "yy") return CorrelationKind::yy;
  if (s == "xy") return CorrelationKind::xy;
  if (s == "complete") return CorrelationKind::complete;
  throw InvalidArgument("unknown correlation kind '" + std::string(s) + "'");
}

std::string to_string(CorrelationKind k) {
  switch (k) {
    case CorrelationKind::xx: return "xx";
    case CorrelationKind::yy: return "yy";
    case CorrelationKind::xy: return "xy";
    case CorrelationKind::complete: return "complete";
  }
  return "?";
}

std::string to_string(SlotDomain d) { return d == SlotDomain::time ? "time" : "frequency"; }

std::string to_string(Polarization p) {
  switch (p) {
    case Polarization::x: return "x";
    case Polarization::y: return "y";
    case Polarization::both: return "both";
  }
  return "?";
}

SlotResponses compute_slot_responses(const Trajectory& traj, double theta, const SlotSpec& slots,
                                     const ResponseOptions& options) {
  slots.validate(traj.grid());
  SlotResponses r;
  r.slots = slots;
  r.theta = theta;
  r.output_energy = traj.final_field().energy();
  require_energy(r.output_energy);

  std::vector<AdjointField> batch;
  auto add = [&](Polarization pol, std::vector<AdjointField>& los, std::vector<cvec>& spec) {
    for (double c : slots.centers) {
      FilteredLo f = filtered_lo(traj, theta, slots.domain, c, slots.width, pol);
      los.push_back(f.field);
      if (slots.domain == SlotDomain::frequency) {
        // Keep only the selected component so spectral overlaps mirror the time-domain ones.
        spec.push_back(std::move(f.spectrum_x));
        spec.push_back(std::move(f.spectrum_y));
      }
      batch.push_back(std::move(f.field));
    }
  };
  if (options.polarized) {
    add(Polarization::x, r.lo_x, r.spec_x);
    add(Polarization::y, r.lo_y, r.spec_y);
  }
  if (options.combined) add(Polarization::both, r.lo_both, r.spec_both);

  auto back = backpropagate_adjoint(batch, traj, options.threads);
  auto it = std::make_move_iterator(back.begin());
  const std::size_t n = slots.size();
  if (options.polarized) {
    r.back_x.assign(it, it + static_cast<std::ptrdiff_t>(n));
    it += static_cast<std::ptrdiff_t>(n);
    r.back_y.assign(it, it + static_cast<std::ptrdiff_t>(n));
    it += static_cast<std::ptrdiff_t>(n);
  }
  if (options.combined) r.back_both.assign(it, it + static_cast<std::ptrdiff_t>(n));
  return r;
}

namespace {

struct Operands {
  const std::vector<AdjointField>* lo_i;
  const std::vector<AdjointField>* lo_j;
  const std::vector<AdjointField>* back_i;
  const std::vector<AdjointField>* back_j;
  const std::vector<cvec>* spec_i;
  const std::vector<cvec>* spec_j;
};

Operands operands(const SlotResponses& r, CorrelationKind kind, bool swap_xy) {
  auto need = [](const std::vector<AdjointField>& v, const char* what) {
    if (v.empty()) throw InvalidArgument(std::string("slot responses lack ") + what + " filtered fields");
  };
  switch (kind) {
    case CorrelationKind::xx:
      need(r.back_x, "x");
      return {&r.lo_x, &r.lo_x, &r.back_x, &r.back_x, &r.spec_x, &r.spec_x};
    case CorrelationKind::yy:
      need(r.back_y, "y");
      return {&r.lo_y, &r.lo_y, &r.back_y, &r.back_y, &r.spec_y, &r.spec_y};
    case CorrelationKind::xy:
      need(r.back_x, "x");
      need(r.back_y, "y");
      if (swap_xy) return {&r.lo_y, &r.lo_x, &r.back_y, &r.back_x, &r.spec_y, &r.spec_x};
      return {&r.lo_x, &r.lo_y, &r.back_x, &r.back_y, &r.spec_x, &r.spec_y};
    case CorrelationKind::complete:
      need(r.back_both, "both-polarization");
      return {&r.lo_both, &r.lo_both, &r.back_both, &r.back_both, &r.spec_both, &r.spec_both};
  }
  throw InvalidArgument("unknown correlation kind");
}

double lo_norm2(const SlotResponses& r, const std::vector<AdjointField>& lo, const std::vector<cvec>& spec,
                std::size_t i) {
  if (r.slots.domain == SlotDomain::frequency)
    return spectral_overlap(lo[i].grid, spec[2 * i], spec[2 * i + 1], spec[2 * i], spec[2 * i + 1]);
  return lo[i].norm2();
}

double shot_noise_of(const SlotResponses& r, const Operands& op, std::size_t i, std::size_t j) {
  if (r.slots.domain == SlotDomain::frequency) {
    const auto& si = *op.spec_i;
    const auto& sj = *op.spec_j;
    return spectral_overlap((*op.lo_i)[i].grid, si[2 * i], si[2 * i + 1], sj[2 * j], sj[2 * j + 1]);
  }
  return real_overlap((*op.lo_i)[i], (*op.lo_j)[j]);
}

}  // namespace

double shot_noise(const SlotResponses& r, CorrelationKind kind, std::size_t i, std::size_t j, bool swap_xy) {
  return shot_noise_of(r, operands(r, kind, swap_xy), i, j);
}

double correlation_numerator(const SlotResponses& r, CorrelationKind kind, std::size_t i, std::size_t j,
                             bool swap_xy) {
  const Operands op = operands(r, kind, swap_xy);
  return complex_overlap((*op.back_i)[i], (*op.back_j)[j]).real() - shot_noise_of(r, op, i, j);
}

std::string_view to_string(Normalization n) {
  return n == Normalization::variance ? "variance" : "shot_noise";
}

Normalization parse_normalization(std::string_view s) {
  if (s == "shot_noise") return Normalization::shot_noise;
  if (s == "variance") return Normalization::variance;
  throw InvalidArgument("unknown normalization '" + std::string(s) + "'");
}

CorrelationMatrix assemble_correlation(const SlotResponses& r, CorrelationKind kind, Normalization norm) {
  const std::size_t n = r.slots.size();
  CorrelationMatrix m;
  m.slots = r.slots;
  m.kind = kind;
  m.normalization = norm;
  m.theta = r.theta;
  m.values.assign(n * n, std::numeric_limits<double>::quiet_NaN());
  m.undefined.assign(n, false);

  const Operands op = operands(r, kind, false);
  const double floor = kMaskFraction * r.output_energy;
  std::vector<double> di(n), dj(n);
  m.row_energy.resize(n);
  m.col_energy.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    di[i] = lo_norm2(r, *op.lo_i, *op.spec_i, i);
    dj[i] = lo_norm2(r, *op.lo_j, *op.spec_j, i);
    m.undefined[i] = di[i] < floor || dj[i] < floor;
    m.row_energy[i] = di[i];
    m.col_energy[i] = dj[i];
    if (norm == Normalization::variance) {
      di[i] = (*op.back_i)[i].norm2();
      dj[i] = (*op.back_j)[i].norm2();
    }
  }
  if (std::all_of(m.undefined.begin(), m.undefined.end(), [](bool u) { return u; }))
    throw UndefinedMeasurement("every slot is below the LO energy floor");

  auto normalized = [&](const Operands& o, std::size_t i, std::size_t j, double dni, double dnj) {
    const cplx ov = complex_overlap((*o.back_i)[i], (*o.back_j)[j]);
    m.max_imag_residue = std::max(m.max_imag_residue, std::abs(ov.imag()));
    return (ov.real() - shot_noise_of(r, o, i, j)) / std::sqrt(dni * dnj);
  };

  const Operands swapped = operands(r, kind, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (m.undefined[i] || m.undefined[j]) continue;
      double v;
      if (kind == CorrelationKind::xy) {
        // C_xy(i, j) and C_yx(i, j) = C_xy(j, i); the published maps are symmetric.
        v = 0.5 * (normalized(op, i, j, di[i], dj[j]) + normalized(swapped, i, j, dj[i], di[j]));
      } else {
        v = normalized(op, i, j, di[i], di[j]);
      }
      m.values[i * n + j] = v;
      m.values[j * n + i] = v;
    }
  }
  return m;
}

namespace {

ResponseOptions options_for(CorrelationKind kind, int threads) {
  ResponseOptions o;
  o.threads = threads;
  o.polarized = kind != CorrelationKind::complete;
  o.combined = kind == CorrelationKind::complete;
  return o;
}

}  // namespace

CorrelationMatrix correlation_matrix(const Trajectory& traj, double theta, const SlotSpec& slots,
                                     CorrelationKind kind, const MeasOptions& options) {
  if (slots.domain != SlotDomain::time) throw InvalidArgument("correlation_matrix expects time-domain slots");
  const auto r = compute_slot_responses(traj, theta, slots, options_for(kind, options.threads));
  return assemble_correlation(r, kind, options.normalization);
}

CorrelationMatrix spectral_correlation_matrix(const Trajectory& traj, double theta, const SlotSpec& slots,
                                              CorrelationKind kind, const MeasOptions& options) {
  if (slots.domain != SlotDomain::frequency)
    throw InvalidArgument("spectral_correlation_matrix expects frequency-domain slots");
  const auto r = compute_slot_responses(traj, theta, slots, options_for(kind, options.threads));
  return assemble_correlation(r, kind, options.normalization);
}

namespace {

std::vector<bool> supported(const std::vector<double>& energy, double fraction) {
  double peak = 0.0;
  for (double e : energy) peak = std::max(peak, e);
  std::vector<bool> out(energy.size());
  for (std::size_t i = 0; i < energy.size(); ++i) out[i] = energy[i] >= fraction * peak;
  return out;
}

}  // namespace

std::vector<bool> supported_slots(const CorrelationMatrix& m, double support_fraction) {
  if (m.row_energy.size() != m.size() || m.col_energy.size() != m.size()) return std::vector<bool>(m.size(), true);
  auto rows = supported(m.row_energy, support_fraction);
  const auto cols = supported(m.col_energy, support_fraction);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = rows[i] || cols[i];
  return rows;
}

namespace {

template <typename Select>
ExtremaReport region_extrema(const CorrelationMatrix& m, const RegionFilter& region, Select&& select) {
  const auto slots = supported_slots(m, region.support_fraction);
  return extrema(m, [&](std::size_t i, std::size_t j, double ci, double cj) {
    return slots[i] && slots[j] && select(i, j, ci < region.split, cj < region.split);
  });
}

}  // namespace


ExtremaReport intrapulse_extrema(const CorrelationMatrix& m, const RegionFilter& region) {
  return region_extrema(m, region, [](std::size_t i, std::size_t j, bool li, bool lj) { return i != j && li == lj; });
}

ExtremaReport interpulse_extrema(const CorrelationMatrix& m, const RegionFilter& region) {
  return region_extrema(m, region, [](std::size_t, std::size_t, bool li, bool lj) { return li != lj; });
}

ExtremaReport band_extrema(const CorrelationMatrix& m, double lo, double hi, double support_fraction) {
  const auto slots = supported_slots(m, support_fraction);
  return extrema(m, [&](std::size_t i, std::size_t j, double ci, double cj) {
    const bool in_i = std::abs(ci) >= lo && std::abs(ci) <= hi;
    const bool in_j = std::abs(cj) >= lo && std::abs(cj) <= hi;
    return slots[i] && slots[j] && in_i && in_j && (ci < 0.0) != (cj < 0.0);
  });
}

ExtremaReport matrix_extrema(const CorrelationMatrix& m, const RegionFilter& region) {
  return region_extrema(m, region, [](std::size_t, std::size_t, bool, bool) { return true; });
}

}  // namespace vsq
