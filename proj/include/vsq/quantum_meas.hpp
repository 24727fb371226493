#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vsq/fluct.hpp"
#include "vsq/nlse.hpp"

namespace vsq {

/// Output field reused as local oscillator: f = U(L) e^{i theta}.
AdjointField make_lo(const Trajectory& traj, double theta);

/// R(theta) = int ||u^A(0)||^2 / int ||u^A(L)||^2 with u^A(L) = make_lo(traj, theta).
/// Throws UndefinedMeasurement when the output energy is zero.
double squeezing_ratio(const Trajectory& traj, double theta, int threads = 1);

/// R(theta) for every theta from two backpropagations.
///
/// Backpropagation is real-linear, so with a = B(U(L)) and b = B(iU(L)),
/// u^A(0) = cos(theta) a + sin(theta) b and
/// R(theta) = (cos^2 |a|^2 + sin^2 |b|^2 + 2 sin cos <a|b>) / E(L).
class SqueezingLandscape {
 public:
  SqueezingLandscape(const Trajectory& traj, int threads = 0);
  double operator()(double theta) const;
  double output_energy() const noexcept { return energy_; }

 private:
  double aa_ = 0.0, bb_ = 0.0, ab_ = 0.0, energy_ = 0.0;
};

struct ThetaOptimum {
  double theta = 0.0;
  double r_min = 1.0;
  /// The 720-point scan saw a spread below 1e-12 (e.g. a linear fiber): theta is arbitrary.
  bool flat = false;
};

/// Minimizes R over [0, 2 pi): 720-point uniform scan, then a three-point parabolic refinement.
ThetaOptimum optimize_theta(const SqueezingLandscape& landscape);
ThetaOptimum optimize_theta(const Trajectory& traj, int threads = 0);

/// Minimum squeezing ratio at several distances along the fiber (each point is its own
/// backpropagation from zeta_k to 0). Returns (zeta_k, min_theta R) pairs, starting with (0, 1).
std::vector<std::pair<double, double>> squeezing_curve(const Trajectory& traj, int points, int threads = 0);

enum class SlotDomain { time, frequency };
enum class Polarization { x, y, both };

/// Rectangular measurement windows. A window with center c and width w selects the
/// samples (or bins) with c - w/2 <= t < c + w/2, so contiguous windows partition the grid.
struct SlotSpec {
  SlotDomain domain = SlotDomain::time;
  std::vector<double> centers;
  double width = 0.0;
  Polarization polarization = Polarization::both;

  /// `count` contiguous windows tiling [lo, hi).
  static SlotSpec uniform(SlotDomain domain, double lo, double hi, int count,
                          Polarization pol = Polarization::both);
  /// One window per spectral bin for bins m in [m_lo, m_hi), centered on the bins.
  static SlotSpec frequency_bins(const TemporalGrid& grid, int m_lo, int m_hi, Polarization pol = Polarization::both);

  /// Throws InvalidParameter: centers must increase, windows must not overlap, and the
  /// width must be at least the grid resolution in the slot's domain.
  void validate(const TemporalGrid& grid) const;
  std::size_t size() const noexcept { return centers.size(); }
};

struct FilteredLo {
  AdjointField field;
  /// Transform-order spectrum of the filtered LO before the e^{i theta} factor is applied
  /// (frequency slots only; empty otherwise).
  cvec spectrum_x, spectrum_y;
  /// No grid sample fell into the window; the field is identically zero.
  bool empty = false;
};

/// LO restricted to one time window (multiplied by Q) or one frequency band
/// (F^-1[W F[U]]), then restricted to the selected polarization.
FilteredLo filtered_lo(const Trajectory& traj, double theta, SlotDomain domain, double center, double width,
                       Polarization polarization);

enum class CorrelationKind { xx, yy, xy, complete };

std::string to_string(CorrelationKind k);
CorrelationKind parse_correlation_kind(std::string_view s);
std::string to_string(SlotDomain d);
std::string to_string(Polarization p);

/// Denominator of the correlation coefficient.
///  shot_noise: sqrt of the zeta = L filtered-LO norms (coherent-state variance).
///  variance:   sqrt of the backpropagated norms, i.e. the actual quadrature variances, which
///              bounds off-diagonal entries by one.
enum class Normalization { shot_noise, variance };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view s);

/// Photon-number correlation matrix over slot centers.
struct CorrelationMatrix {
  SlotSpec slots;
  CorrelationKind kind = CorrelationKind::complete;
  Normalization normalization = Normalization::shot_noise;
  double theta = 0.0;
  std::string meta;
  /// Row-major n x n, NaN where undefined.
  std::vector<double> values;
  /// Per-slot mask: the slot's LO energy is below 1e-12 E(L).
  std::vector<bool> undefined;
  /// Filtered-LO energies of the row (k) and column (n) measurements per slot.
  std::vector<double> row_energy, col_energy;
  /// Largest |imag| seen in the numerator inner products.
  double max_imag_residue = 0.0;

  std::size_t size() const noexcept { return slots.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  bool defined(std::size_t i, std::size_t j) const { return !undefined[i] && !undefined[j]; }
};

/// Numerators and denominators of the correlation formula for one slot set, before
/// normalization: N[i][j] = <a_i|a_j> - <f_i|f_j> with a = backpropagated filtered LO.
struct SlotResponses {
  SlotSpec slots;
  double theta = 0.0;
  double output_energy = 0.0;
  /// Filtered LOs at zeta = L and their backpropagations, per polarization filter.
  std::vector<AdjointField> lo_x, lo_y, lo_both, back_x, back_y, back_both;
  std::vector<cvec> spec_x, spec_y, spec_both;  // frequency slots only
};

struct ResponseOptions {
  bool polarized = true;  ///< compute x- and y-filtered responses (needed for xx, yy, xy)
  bool combined = true;   ///< compute both-polarization responses (complete)
  int threads = 0;
};

SlotResponses compute_slot_responses(const Trajectory& traj, double theta, const SlotSpec& slots,
                                     const ResponseOptions& options = {});

/// Raw numerator N_kn(i, j) (not symmetrized). kind = xy gives k = x for slot i, n = y for slot j;
/// use swap_xy = true for the yx ordering.
double correlation_numerator(const SlotResponses& r, CorrelationKind kind, std::size_t i, std::size_t j,
                             bool swap_xy = false);
/// Shot-noise term Delta_kn(i, j): the zeta = L overlap of the filtered LOs.
double shot_noise(const SlotResponses& r, CorrelationKind kind, std::size_t i, std::size_t j, bool swap_xy = false);

CorrelationMatrix assemble_correlation(const SlotResponses& r, CorrelationKind kind,
                                       Normalization norm = Normalization::shot_noise);

struct MeasOptions {
  int threads = 0;
  Normalization normalization = Normalization::shot_noise;
};

/// Time-domain C_kn(tau_i, tau_j) or complete C at a fixed theta.
CorrelationMatrix correlation_matrix(const Trajectory& traj, double theta, const SlotSpec& slots,
                                     CorrelationKind kind, const MeasOptions& options = {});
/// Frequency-domain S counterparts; `slots.domain` must be frequency.
CorrelationMatrix spectral_correlation_matrix(const Trajectory& traj, double theta, const SlotSpec& slots,
                                              CorrelationKind kind, const MeasOptions& options = {});

struct Extremum {
  double value = 0.0;
  double at_i = 0.0;  ///< slot center of the row
  double at_j = 0.0;  ///< slot center of the column
  bool found = false;
};

struct ExtremaReport {
  Extremum min, max;
};

/// Extrema over defined entries whose row/column centers satisfy `select`.
template <typename Select>
ExtremaReport extrema(const CorrelationMatrix& m, Select&& select) {
  ExtremaReport r;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (!m.defined(i, j)) continue;
      const double ci = m.slots.centers[i], cj = m.slots.centers[j];
      if (!select(i, j, ci, cj)) continue;
      const double v = m.at(i, j);
      if (!r.min.found || v < r.min.value) r.min = {v, ci, cj, true};
      if (!r.max.found || v > r.max.value) r.max = {v, ci, cj, true};
    }
  return r;
}

/// Quadrant split point and pulse-support threshold for extrema searches.
struct RegionFilter {
  double split = 0.0;
  double support_fraction = 0.0;
};

/// Slots whose row or column filtered-LO energy reaches `support_fraction` of the largest
/// slot energy of that measurement.
std::vector<bool> supported_slots(const CorrelationMatrix& m, double support_fraction);

/// Same-side (intrapulse) entries: both centers on the same side of `split`, i != j.
ExtremaReport intrapulse_extrema(const CorrelationMatrix& m, const RegionFilter& region = {});
/// Opposite-side (interpulse) entries.
ExtremaReport interpulse_extrema(const CorrelationMatrix& m, const RegionFilter& region = {});
/// Opposite-sign entries with both |centers| in [lo, hi] (e.g. a pair of spectral side bands).
ExtremaReport band_extrema(const CorrelationMatrix& m, double lo, double hi, double support_fraction = 0.0);
/// Every supported entry, diagonal included.
ExtremaReport matrix_extrema(const CorrelationMatrix& m, const RegionFilter& region = {});

}  // namespace vsq
