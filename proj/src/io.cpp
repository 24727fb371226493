#include "vsq/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "vsq/error.hpp"
#include "vsq/scenarios.hpp"

namespace vsq {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

constexpr char kTrajMagic[8] = {'V', 'S', 'Q', 'T', 'R', 'A', 'J', '\0'};
constexpr char kCorrMagic[8] = {'V', 'S', 'Q', 'C', 'O', 'R', 'R', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  template <typename T>
  void put(T v) {
    v = to_le(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void finish(const std::filesystem::path& path) {
    out_.flush();
    if (!out_) throw std::runtime_error("write to " + path.string() + " failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot open " + path.string());
  }
  template <typename T>
  T get() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw std::runtime_error(path_.string() + ": truncated file");
    return to_le(v);
  }
  void expect_magic(const char (&magic)[8]) {
    char buf[8];
    in_.read(buf, 8);
    if (!in_ || std::memcmp(buf, magic, 8) != 0) throw std::runtime_error(path_.string() + ": bad magic");
    if (get<std::uint32_t>() != kVersion) throw std::runtime_error(path_.string() + ": unsupported version");
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

void put_coefficient(Writer& w, const ModulatedCoefficient& c) {
  w.put(c.base);
  w.put(static_cast<std::uint32_t>(c.modulation.kind));
  w.put(c.modulation.period);
  w.put(c.modulation.depth);
  w.put(c.sense);
}

ModulatedCoefficient get_coefficient(Reader& r) {
  ModulatedCoefficient c;
  c.base = r.get<double>();
  const auto kind = r.get<std::uint32_t>();
  if (kind > 2) throw std::runtime_error("bad modulation kind in trajectory file");
  c.modulation.kind = static_cast<ModulationKind>(kind);
  c.modulation.period = r.get<double>();
  c.modulation.depth = r.get<double>();
  c.sense = r.get<double>();
  return c;
}

void put_field(Writer& w, const cvec& u) {
  for (const cplx& z : u) {
    w.put(static_cast<float>(z.real()));
    w.put(static_cast<float>(z.imag()));
  }
}

void get_field(Reader& r, cvec& u) {
  for (cplx& z : u) {
    const float re = r.get<float>();
    const float im = r.get<float>();
    z = {re, im};
  }
}

std::ofstream open_text(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.precision(17);
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

CorrelationKind kind_from_index(std::uint32_t k) {
  if (k > 3) throw std::runtime_error("bad correlation kind");
  return static_cast<CorrelationKind>(k);
}

Rgb lerp_stops(const std::vector<Rgb>& stops, double t) {
  t = std::clamp(t, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(k);
  Rgb c;
  for (int ch = 0; ch < 3; ++ch)
    c[ch] = static_cast<std::uint8_t>(std::lround((1.0 - f) * stops[k][ch] + f * stops[k + 1][ch]));
  return c;
}

void write_ppm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               const std::vector<Rgb>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "P6\n" << width << ' ' << height << "\n255\n";
  for (const Rgb& p : pixels) out.write(reinterpret_cast<const char*>(p.data()), 3);
  check_written(out, path);
}

}  // namespace

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj, int snapshot_stride) {
  if (snapshot_stride < 1) throw InvalidParameter("snapshot stride must be >= 1");
  const auto& g = traj.grid();
  const auto& p = traj.profile();
  std::vector<int> steps;
  for (int k = 0; k <= traj.n_steps(); k += snapshot_stride) steps.push_back(k);
  if (steps.back() != traj.n_steps()) steps.push_back(traj.n_steps());

  Writer w(path);
  w.raw(kTrajMagic, 8);
  w.put(kVersion);
  w.put(static_cast<std::uint64_t>(g.size()));
  w.put(g.tau_min());
  w.put(g.tau_max());
  w.put(static_cast<std::uint32_t>(traj.n_steps()));
  w.put(traj.d_zeta());
  w.put(p.a_coef);
  w.put(p.b_coef);
  w.put(p.c_coef);
  w.put(p.length);
  put_coefficient(w, p.dispersion);
  put_coefficient(w, p.birefringence);
  put_coefficient(w, p.group_delay);
  w.put(static_cast<std::uint32_t>(snapshot_stride));
  w.put(static_cast<std::uint32_t>(steps.size()));

  std::size_t next = 0;
  auto emit = [&](int k, const PolarizedField& f) {
    w.put(static_cast<std::uint32_t>(k));
    put_field(w, f.ux);
    put_field(w, f.uy);
  };
  traj.for_each_step_forward([&](int k, const PolarizedField& f) {
    if (next < steps.size() && steps[next] == k) {
      emit(k, f);
      ++next;
    }
  });
  if (next < steps.size()) emit(traj.n_steps(), traj.final_field());
  w.finish(path);
}

TrajectoryFile read_trajectory(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kTrajMagic);
  TrajectoryFile t;
  const auto n = r.get<std::uint64_t>();
  const double tmin = r.get<double>();
  const double tmax = r.get<double>();
  t.grid = TemporalGrid(static_cast<std::size_t>(n), tmin, tmax);
  t.n_steps = static_cast<int>(r.get<std::uint32_t>());
  t.d_zeta = r.get<double>();
  t.profile.a_coef = r.get<double>();
  t.profile.b_coef = r.get<double>();
  t.profile.c_coef = r.get<double>();
  t.profile.length = r.get<double>();
  t.profile.dispersion = get_coefficient(r);
  t.profile.birefringence = get_coefficient(r);
  t.profile.group_delay = get_coefficient(r);
  t.snapshot_stride = static_cast<int>(r.get<std::uint32_t>());
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t s = 0; s < count; ++s) {
    t.steps.push_back(static_cast<int>(r.get<std::uint32_t>()));
    PolarizedField f(t.grid);
    get_field(r, f.ux);
    get_field(r, f.uy);
    t.snapshots.push_back(std::move(f));
  }
  return t;
}

void write_snapshot_csv(const std::filesystem::path& path, const PolarizedField& field) {
  auto out = open_text(path);
  out << "tau,re_x,im_x,re_y,im_y,intensity\n";
  for (std::size_t j = 0; j < field.grid.size(); ++j) {
    const cplx x = field.ux[j], y = field.uy[j];
    out << field.grid.tau(j) << ',' << x.real() << ',' << x.imag() << ',' << y.real() << ',' << y.imag() << ','
        << std::norm(x) + std::norm(y) << '\n';
  }
  check_written(out, path);
}

void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size()) throw InvalidArgument("column names and data differ in count");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw InvalidArgument("CSV columns differ in length");
  auto out = open_text(path);
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c][r];
    out << '\n';
  }
  check_written(out, path);
}

void write_matrix_text(const std::filesystem::path& path, const CorrelationMatrix& m) {
  auto out = open_text(path);
  out << "# vsq correlation matrix\n";
  out << "kind = " << to_string(m.kind) << '\n';
  out << "domain = " << to_string(m.slots.domain) << '\n';
  out << "normalization = " << to_string(m.normalization) << '\n';
  out << "theta = " << m.theta << '\n';
  out << "width = " << m.slots.width << '\n';
  out << "centers =";
  for (double c : m.slots.centers) out << ' ' << c;
  out << "\nmask =";
  for (bool u : m.undefined) out << ' ' << (u ? 1 : 0);
  out << "\ndata\n";
  char buf[32];
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = m.at(i, j);
      if (std::isnan(v))
        std::snprintf(buf, sizeof buf, "nan");
      else
        std::snprintf(buf, sizeof buf, "%.10f", v == 0.0 ? 0.0 : v);
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
  check_written(out, path);
}

CorrelationMatrix read_matrix_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CorrelationMatrix m;
  std::string line;
  auto fail = [&](const std::string& why) { throw std::runtime_error(path.string() + ": " + why); };
  std::vector<int> mask;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "data") break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("malformed header line '" + line + "'");
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(' ') + 1);
    std::istringstream value(line.substr(eq + 1));
    if (key == "kind") {
      std::string k;
      value >> k;
      m.kind = parse_correlation_kind(k);
    } else if (key == "domain") {
      std::string d;
      value >> d;
      if (d != "time" && d != "frequency") fail("bad domain");
      m.slots.domain = d == "time" ? SlotDomain::time : SlotDomain::frequency;
    } else if (key == "normalization") {
      std::string s;
      value >> s;
      m.normalization = parse_normalization(s);
    } else if (key == "theta") {
      value >> m.theta;
    } else if (key == "width") {
      value >> m.slots.width;
    } else if (key == "centers") {
      for (double c; value >> c;) m.slots.centers.push_back(c);
    } else if (key == "mask") {
      for (int v; value >> v;) mask.push_back(v);
    } else {
      fail("unknown header key '" + key + "'");
    }
  }
  const std::size_t n = m.slots.centers.size();
  if (mask.size() != n) fail("mask length differs from slot count");
  for (int v : mask) m.undefined.push_back(v != 0);
  m.values.reserve(n * n);
  std::string tok;
  while (m.values.size() < n * n && in >> tok) {
    if (tok == "nan")
      m.values.push_back(std::numeric_limits<double>::quiet_NaN());
    else
      m.values.push_back(std::stod(tok));
  }
  if (m.values.size() != n * n) fail("matrix data is truncated");
  return m;
}

void write_matrix_binary(const std::filesystem::path& path, const CorrelationMatrix& m) {
  Writer w(path);
  w.raw(kCorrMagic, 8);
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(m.kind));
  w.put(static_cast<std::uint32_t>(m.slots.domain));
  w.put(static_cast<std::uint32_t>(m.normalization));
  w.put(m.theta);
  w.put(m.slots.width);
  w.put(static_cast<std::uint32_t>(m.size()));
  for (double c : m.slots.centers) w.put(c);
  for (bool u : m.undefined) w.put(static_cast<std::uint8_t>(u ? 1 : 0));
  for (double v : m.values) w.put(v);
  w.finish(path);
}

CorrelationMatrix read_matrix_binary(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kCorrMagic);
  CorrelationMatrix m;
  m.kind = kind_from_index(r.get<std::uint32_t>());
  const auto domain = r.get<std::uint32_t>();
  if (domain > 1) throw std::runtime_error(path.string() + ": bad domain");
  m.slots.domain = static_cast<SlotDomain>(domain);
  const auto norm = r.get<std::uint32_t>();
  if (norm > 1) throw std::runtime_error(path.string() + ": bad normalization");
  m.normalization = static_cast<Normalization>(norm);
  m.theta = r.get<double>();
  m.slots.width = r.get<double>();
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) m.slots.centers.push_back(r.get<double>());
  for (std::uint32_t i = 0; i < n; ++i) m.undefined.push_back(r.get<std::uint8_t>() != 0);
  m.values.resize(static_cast<std::size_t>(n) * n);
  for (double& v : m.values) v = r.get<double>();
  return m;
}

const std::array<Rgb, 256>& diverging_colormap() {
  static const std::array<Rgb, 256> table = [] {
    // Red-blue diverging stops from -1 to +1.
    const std::vector<Rgb> stops = {{5, 48, 97},    {33, 102, 172}, {67, 147, 195}, {146, 197, 222},
                                    {209, 229, 240}, {247, 247, 247}, {253, 219, 199}, {244, 165, 130},
                                    {214, 96, 77},   {178, 24, 43},   {103, 0, 31}};
    std::array<Rgb, 256> t{};
    for (int i = 0; i < 256; ++i) t[i] = lerp_stops(stops, i / 255.0);
    return t;
  }();
  return table;
}

Rgb diverging_color(double v) {
  const double c = std::clamp(v, -1.0, 1.0);
  return diverging_colormap()[static_cast<std::size_t>(std::lround((c + 1.0) * 127.5))];
}

void write_heatmap(const CorrelationMatrix& m, const std::filesystem::path& path, int pixel_size) {
  const std::size_t n = m.size();
  if (n == 0) throw InvalidArgument("cannot render an empty matrix");
  if (pixel_size < 1) throw InvalidParameter("pixel size must be >= 1");
  const std::size_t px = static_cast<std::size_t>(pixel_size);
  const std::size_t side = n * px;
  std::vector<Rgb> pixels(side * side);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      // Row 0 of the image shows the largest slot center so the picture reads like a plot.
      const std::size_t i = n - 1 - r / px, j = c / px;
      const double v = m.at(i, j);
      pixels[r * side + c] = (std::isnan(v) || !m.defined(i, j)) ? kMaskedGray : diverging_color(v);
    }
  write_ppm(path, side, side, pixels);

  auto axes_path = path;
  axes_path += ".axes.txt";
  auto out = open_text(axes_path);
  out << "kind = " << to_string(m.kind) << '\n';
  out << "domain = " << to_string(m.slots.domain) << '\n';
  out << "normalization = " << to_string(m.normalization) << '\n';
  out << "theta = " << m.theta << '\n';
  out << "pixel_size = " << pixel_size << '\n';
  out << "color_range = -1 1\n";
  out << "x_axis = column slot center, left to right\n";
  out << "y_axis = row slot center, bottom to top\n";
  out << "centers =";
  for (double c : m.slots.centers) out << ' ' << c;
  out << '\n';
  check_written(out, axes_path);
}

void write_intensity_map(const Trajectory& traj, const std::filesystem::path& stem, std::size_t max_rows,
                         std::size_t max_cols) {
  const auto& g = traj.grid();
  const std::size_t n = g.size();
  const std::size_t col_step = std::max<std::size_t>(1, (n + max_cols - 1) / max_cols);
  const int steps = traj.n_steps();
  const int row_step = std::max(1, static_cast<int>((static_cast<std::size_t>(steps) + max_rows) / max_rows));

  std::vector<double> zetas;
  std::vector<rvec> rows;
  auto take = [&](int k, const PolarizedField& f) {
    rvec row;
    for (std::size_t j = 0; j < n; j += col_step) row.push_back(std::norm(f.ux[j]) + std::norm(f.uy[j]));
    zetas.push_back(k * traj.d_zeta());
    rows.push_back(std::move(row));
  };
  traj.for_each_step_forward([&](int k, const PolarizedField& f) {
    if (k % row_step == 0) take(k, f);
  });
  take(steps, traj.final_field());

  auto csv = stem;
  csv += ".csv";
  auto out = open_text(csv);
  out << "zeta\\tau";
  for (std::size_t j = 0; j < n; j += col_step) out << ',' << g.tau(j);
  out << '\n';
  double peak = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << zetas[r];
    for (double v : rows[r]) {
      out << ',' << v;
      peak = std::max(peak, v);
    }
    out << '\n';
  }
  check_written(out, csv);

  const std::vector<Rgb> stops = {{0, 0, 4}, {87, 16, 110}, {188, 55, 84}, {249, 142, 9}, {252, 255, 164}};
  const std::size_t width = rows.front().size(), height = rows.size();
  std::vector<Rgb> pixels(width * height);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c)
      pixels[r * width + c] = lerp_stops(stops, peak > 0 ? rows[height - 1 - r][c] / peak : 0.0);
  auto ppm = stem;
  ppm += ".ppm";
  write_ppm(ppm, width, height, pixels);
}

void write_metrics(const std::filesystem::path& path, const Metrics& metrics) {
  auto out = open_text(path);
  for (const auto& [k, v] : metrics.entries()) out << k << " = " << v << '\n';
  check_written(out, path);
}

}  // namespace vsq
