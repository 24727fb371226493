#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vsq/lattice.hpp"
#include "vsq/nlse.hpp"
#include "vsq/quantum_meas.hpp"

namespace vsq {

class Metrics;

/// Trajectory file layout (all little endian):
///
///   char[8]  "VSQTRAJ\0"
///   u32      version (1)
///   u64      n_points
///   f64      tau_min, tau_max
///   u32      n_steps
///   f64      d_zeta
///   profile  f64 A, B, C, L, then for D, b, b1: f64 base, u32 kind, f64 period, f64 depth, f64 sense
///   u32      snapshot stride K, u32 snapshot count S
///   S times: u32 step index, then n_points complex64 (f32 re, f32 im) for U_x, then for U_y
///
/// Snapshots are taken at steps 0, K, 2K, ... and always include the final step.
struct TrajectoryFile {
  TemporalGrid grid = TemporalGrid::standard();
  FiberProfile profile;
  int n_steps = 0;
  double d_zeta = 0.0;
  int snapshot_stride = 1;
  std::vector<int> steps;
  std::vector<PolarizedField> snapshots;
};

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj, int snapshot_stride = 1);
/// Throws std::runtime_error on a malformed or truncated file.
TrajectoryFile read_trajectory(const std::filesystem::path& path);

/// Columns: tau, re_x, im_x, re_y, im_y, intensity.
void write_snapshot_csv(const std::filesystem::path& path, const PolarizedField& field);

/// Named columns of equal length as CSV with full double precision.
void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns);

/// Text matrix format:
///
///   # vsq correlation matrix
///   kind = complete
///   domain = time
///   normalization = variance
///   theta = <value>
///   width = <value>
///   centers = c0 c1 ...
///   mask = 0 1 ...            (1 marks an undefined slot)
///   data
///   <n rows of n values, %.10f, "nan" where undefined>
void write_matrix_text(const std::filesystem::path& path, const CorrelationMatrix& m);
CorrelationMatrix read_matrix_text(const std::filesystem::path& path);

/// Binary twin of the text format: "VSQCORR\0", u32 version, u32 kind, u32 domain, u32 normalization,
/// f64 theta, f64 width, u32 n, n f64 centers, n u8 mask, n*n f64 values.
void write_matrix_binary(const std::filesystem::path& path, const CorrelationMatrix& m);
CorrelationMatrix read_matrix_binary(const std::filesystem::path& path);

using Rgb = std::array<std::uint8_t, 3>;

/// Fixed 256-entry diverging map: index 0 is deep blue (-1), 255 deep red (+1), the middle
/// entries white.
const std::array<Rgb, 256>& diverging_colormap();
/// Color of a value clipped to [-1, 1].
Rgb diverging_color(double v);
inline constexpr Rgb kMaskedGray{128, 128, 128};

/// Binary P6 image, one pixel per matrix entry scaled by `pixel_size`, row 0 at the top;
/// axis metadata goes to `path` + ".axes.txt".
void write_heatmap(const CorrelationMatrix& m, const std::filesystem::path& path, int pixel_size = 4);

/// Intensity I(zeta, tau) as a P6 image (zeta upward) and a CSV table, both decimated to
/// at most `max_rows` x `max_cols`.
void write_intensity_map(const Trajectory& traj, const std::filesystem::path& stem, std::size_t max_rows = 256,
                         std::size_t max_cols = 512);

void write_metrics(const std::filesystem::path& path, const Metrics& metrics);

}  // namespace vsq
