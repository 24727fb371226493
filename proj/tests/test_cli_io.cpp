#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "vsq/cli.hpp"
#include "vsq/config.hpp"
#include "vsq/io.hpp"

using namespace vsq;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("vsq_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vsq");
  args.push_back("--quiet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::map<std::string, std::string> read_metrics(const fs::path& p) {
  std::map<std::string, std::string> out;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

bool has_problem(const ConfigError& e, std::string_view needle) {
  for (const auto& p : e.problems())
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

ConfigError config_error(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  return ConfigError({});
}

constexpr const char* kFig1Caption = R"(# Manakov, single pulse u0 = 2, sine dispersion modulation zeta_m = 1.3, L = 2 pi
[fiber]
model = manakov
length = 6.283185307179586

[dispersion]
modulation = sine
zeta_m = 1.3
depth = 0.2

[input]
u0 = 2

[measure]
spectral_kinds = complete
spectral_bands = 0.3:1.2, 1.2:2.2
)";

}  // namespace

TEST(Config, MinimalConfigFillsDefaults) {
  const auto c = parse_config("[fiber]\nmodel = manakov\nlength = 6.2832\n[input]\nu0 = 2\n");
  EXPECT_EQ(c.settings.n_points, 4096u);
  EXPECT_EQ(c.settings.tau_min, -20.0);
  EXPECT_EQ(c.settings.tau_max, 20.0);
  EXPECT_EQ(c.settings.steps_for(c.physics.length), static_cast<int>(std::ceil(200.0 * 6.2832)));
  EXPECT_FALSE(c.settings.theta.has_value());
  EXPECT_EQ(c.physics.initial.u0, 2.0);
  EXPECT_FALSE(c.physics.initial.pair);
}

TEST(Config, ZeroModulationPeriodNamesTheKey) {
  const auto e = config_error("[fiber]\nlength = 1\n[dispersion]\nmodulation = sine\nzeta_m = 0\ndepth = 0.2\n");
  ASSERT_EQ(e.problems().size(), 1u);
  EXPECT_TRUE(has_problem(e, "line 5: dispersion.zeta_m"));
}

TEST(Config, CollectsEveryError) {
  const auto e = config_error(
      "[fiber]\nmodel = manakov\nlength = 1\ncolour = red\n"
      "[input]\nu0 = lots\n"
      "[grid]\nn_points = 1000\n"
      "[measure]\ntime_kinds = xx, zz\n"
      "[extras]\nfoo = 1\n"
      "[birefringence]\nb = 5\n");
  EXPECT_TRUE(has_problem(e, "line 4: fiber.colour: unknown key"));
  EXPECT_TRUE(has_problem(e, "line 6: input.u0: expected a number"));
  EXPECT_TRUE(has_problem(e, "line 10: measure.time_kinds"));
  EXPECT_TRUE(has_problem(e, "line 11: unknown section [extras]"));
  EXPECT_TRUE(has_problem(e, "grid:"));
  EXPECT_TRUE(has_problem(e, "birefringence.b: only the birefringent model"));
  EXPECT_EQ(e.problems().size(), 6u);
}

TEST(Config, DuplicateAndStrayKeys) {
  const auto e = config_error("u0 = 2\n[input]\nu0 = 2\nu0 = 3\n[fiber]\nlength\n");
  EXPECT_TRUE(has_problem(e, "line 1: u0: key outside of any section"));
  EXPECT_TRUE(has_problem(e, "line 4: input.u0: assigned more than once"));
  EXPECT_TRUE(has_problem(e, "line 6: expected 'key = value'"));
}

TEST(Config, Fig1CaptionEqualsPreset) {
  EXPECT_EQ(parse_config(kFig1Caption), from_scenario(scenario("fig1")));
}

TEST(Config, RoundTripsEveryPreset) {
  for (const auto& name : scenario_names()) {
    const auto c = from_scenario(scenario(name));
    EXPECT_EQ(parse_config(serialize_config(c)), c) << name;
  }
}

TEST(Config, RoundTripsNonDefaultValues) {
  RunConfig c;
  c.physics.model = Model::birefringent;
  c.physics.units = AmplitudeUnits::field;
  c.physics.initial = {true, 1.25, 2.5, -0.75};
  c.physics.length = 0.1 + 0.2;
  c.physics.b = 12.5;
  c.physics.b1 = 1.0 / 3.0;
  c.physics.dispersion_mod = ModulationSpec::truncated_sine(1.3, 0.2);
  c.physics.group_delay_mod = ModulationSpec::sine(0.7, 0.05);
  c.settings.n_points = 1024;
  c.settings.tau_min = -15.5;
  c.settings.n_steps = 321;
  c.settings.checkpoint_stride = 8;
  c.settings.theta = 2.0 / 3.0;
  c.settings.normalization = Normalization::shot_noise;
  c.settings.threads = 3;
  c.settings.split_at = 0.25;
  c.settings.support_fraction = 0.1;
  c.settings.time_kinds = {CorrelationKind::xy, CorrelationKind::xx};
  c.settings.time_slots = {-10.0, 10.0, 40};
  c.settings.spectral_kinds = {CorrelationKind::yy};
  c.settings.spectral_slots = {-2.0, 2.0, 16};
  c.settings.spectral_bands = {{0.5, 1.5}};
  c.settings.intensity_map = false;
  c.settings.curve_points = 7;
  c.output_dir = "runs/a b";
  const auto text = serialize_config(c);
  EXPECT_EQ(parse_config(text), c);
  EXPECT_EQ(serialize_config(parse_config(text)), text);
}

TEST(Config, PhysicalUnits) {
  const auto p = parse_physical_config(
      "[physical]\nmodel = manakov\nt0 = 1e-12\nbeta2_avg = -2e-26\ngamma = 1.3e-3\na_eff = 8e-11\nlength = 100\n");
  EXPECT_EQ(p.beta2.base, -2e-26);
  EXPECT_EQ(p.model, Model::manakov);
  EXPECT_THROW(parse_physical_config("[physical]\nt0 = 0\nbeta2_avg = -1\na_eff = 1\n"), ConfigError);
  try {
    parse_physical_config("[physical]\nt0 = 1\nbeta2_avg = -1\na_eff = 1\n[beta2]\nmodulation = sine\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_TRUE(has_problem(e, "beta2.period_m"));
  }
}

TEST(TrajectoryFile, RoundTrip) {
  TempDir dir;
  const TemporalGrid g(128, -10.0, 10.0);
  const auto profile = FiberProfile::birefringent(0.5, 3.0, 1.5, ModulationSpec::sine(1.3, 0.2));
  const auto traj = propagate_classical(make_initial_pair(g, 1.5, 2.0, 0.5), profile, 25);
  write_trajectory(dir.path() / "t.vsqt", traj, 10);
  const auto f = read_trajectory(dir.path() / "t.vsqt");
  EXPECT_EQ(f.grid, g);
  EXPECT_EQ(f.profile, profile);
  EXPECT_EQ(f.n_steps, 25);
  EXPECT_EQ(f.d_zeta, traj.d_zeta());
  EXPECT_EQ(f.steps, (std::vector<int>{0, 10, 20, 25}));
  for (std::size_t s = 0; s < f.steps.size(); ++s) {
    const auto ref = traj.state(f.steps[s]);
    for (std::size_t j = 0; j < g.size(); ++j) {
      EXPECT_NEAR(std::abs(f.snapshots[s].ux[j] - ref.ux[j]), 0.0, 1e-6);
      EXPECT_NEAR(std::abs(f.snapshots[s].uy[j] - ref.uy[j]), 0.0, 1e-6);
    }
  }
  const auto bytes = slurp(dir.path() / "t.vsqt");
  spit(dir.path() / "cut.vsqt", bytes.substr(0, bytes.size() - 9));
  EXPECT_THROW(read_trajectory(dir.path() / "cut.vsqt"), std::runtime_error);
  spit(dir.path() / "bad.vsqt", "NOTATRAJ" + bytes.substr(8));
  EXPECT_THROW(read_trajectory(dir.path() / "bad.vsqt"), std::runtime_error);
}

TEST(MatrixFiles, RoundTripWithMask) {
  TempDir dir;
  CorrelationMatrix m;
  m.slots = SlotSpec::uniform(SlotDomain::frequency, -1.0, 1.0, 3);
  m.kind = CorrelationKind::xy;
  m.normalization = Normalization::variance;
  m.theta = 1.234567890123;
  m.undefined = {false, true, false};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.values = {0.5, nan, -0.25, nan, nan, nan, -0.25, nan, 1.0 / 3.0};
  write_matrix_binary(dir.path() / "m.bin", m);
  write_matrix_text(dir.path() / "m.txt", m);
  for (const auto& r : {read_matrix_binary(dir.path() / "m.bin"), read_matrix_text(dir.path() / "m.txt")}) {
    EXPECT_EQ(r.kind, m.kind);
    EXPECT_EQ(r.normalization, m.normalization);
    EXPECT_EQ(r.slots.domain, SlotDomain::frequency);
    EXPECT_EQ(r.undefined, m.undefined);
    ASSERT_EQ(r.values.size(), 9u);
    for (std::size_t k = 0; k < 9; ++k) {
      if (std::isnan(m.values[k])) EXPECT_TRUE(std::isnan(r.values[k]));
      else EXPECT_NEAR(r.values[k], m.values[k], 1e-10);
    }
    EXPECT_NEAR(r.theta, m.theta, 1e-10);
  }
  EXPECT_EQ(read_matrix_binary(dir.path() / "m.bin").values[8], 1.0 / 3.0);
}

TEST(Heatmap, CornerPixelsHitColormapEnds) {
  TempDir dir;
  CorrelationMatrix m;
  m.slots = SlotSpec::uniform(SlotDomain::time, -1.0, 1.0, 2);
  m.values = {1.0, -1.0, -1.0, 1.0};
  m.undefined = {false, false};
  write_heatmap(m, dir.path() / "h.ppm", 1);
  const auto img = slurp(dir.path() / "h.ppm");
  const std::string header = "P6\n2 2\n255\n";
  ASSERT_EQ(img.substr(0, header.size()), header);
  auto pixel = [&](int r, int c) {
    const auto* p = reinterpret_cast<const unsigned char*>(img.data() + header.size() + 3 * (2 * r + c));
    return Rgb{p[0], p[1], p[2]};
  };
  const auto& cmap = diverging_colormap();
  // Image row 0 holds the slot with the largest center, so the anti-diagonal is on top.
  EXPECT_EQ(pixel(0, 0), cmap[0]);
  EXPECT_EQ(pixel(0, 1), cmap[255]);
  EXPECT_EQ(pixel(1, 0), cmap[255]);
  EXPECT_EQ(pixel(1, 1), cmap[0]);
  EXPECT_GT(cmap[0][2], cmap[0][0]);    // blue end
  EXPECT_GT(cmap[255][0], cmap[255][2]);  // red end
  EXPECT_TRUE(fs::exists(dir.path() / "h.ppm.axes.txt"));
}

TEST(Heatmap, ZeroMatrixIsUniformAndMaskIsGray) {
  TempDir dir;
  CorrelationMatrix m;
  m.slots = SlotSpec::uniform(SlotDomain::time, -2.0, 2.0, 4);
  m.values.assign(16, 0.0);
  m.undefined.assign(4, false);
  write_heatmap(m, dir.path() / "z.ppm", 3);
  const auto img = slurp(dir.path() / "z.ppm");
  const std::string header = "P6\n12 12\n255\n";
  ASSERT_EQ(img.size(), header.size() + 12 * 12 * 3);
  const auto center = diverging_color(0.0);
  for (std::size_t k = header.size(); k < img.size(); k += 3)
    EXPECT_EQ((Rgb{static_cast<std::uint8_t>(img[k]), static_cast<std::uint8_t>(img[k + 1]),
                   static_cast<std::uint8_t>(img[k + 2])}),
              center);
  m.undefined[0] = true;
  m.values[0] = std::numeric_limits<double>::quiet_NaN();
  write_heatmap(m, dir.path() / "g.ppm", 1);
  const auto gray = slurp(dir.path() / "g.ppm");
  // Row 0 is the largest center, so slot 0 sits in the bottom-left pixel.
  const std::size_t bottom_left = std::string("P6\n4 4\n255\n").size() + 3 * 12;
  EXPECT_EQ(static_cast<std::uint8_t>(gray[bottom_left]), kMaskedGray[0]);
}

TEST(Cli, ListAndUsageErrors) {
  EXPECT_EQ(run_cli({"scenario", "--list"}), 0);
  EXPECT_EQ(run_cli({"nonsense"}), 1);
  EXPECT_EQ(run_cli({}), 1);
  EXPECT_EQ(run_cli({"squeeze"}), 1);  // --config is required
  EXPECT_EQ(run_cli({"scenario", "fig99", "--out", "/tmp/vsq_unused"}), 1);
}

TEST(Cli, InvalidConfigExitsOne) {
  TempDir dir;
  spit(dir.path() / "bad.ini", "[fiber]\nlength = 1\n[dispersion]\nmodulation = sine\nzeta_m = 0\n");
  EXPECT_EQ(run_cli({"squeeze", "-c", (dir.path() / "bad.ini").string(), "-o", (dir.path() / "out").string()}), 1);
}

TEST(Cli, NumericalFailureExitsTwo) {
  TempDir dir;
  spit(dir.path() / "hot.ini",
       "[fiber]\nmodel = birefringent\nlength = 1\n[input]\nu0 = 1000\n[grid]\nn_points = 256\nn_steps = 10\n");
  EXPECT_EQ(run_cli({"propagate", "-c", (dir.path() / "hot.ini").string(), "-o", (dir.path() / "out").string()}), 2);
}

TEST(Cli, SqueezeOnLinearFiber) {
  TempDir dir;
  spit(dir.path() / "lin.ini",
       "[fiber]\nmodel = linear\nlength = 3\n[input]\nu0 = 2\n[grid]\nn_points = 512\n[output]\ndirectory = " +
           (dir.path() / "out").string() + "\n");
  ASSERT_EQ(run_cli({"squeeze", "-c", (dir.path() / "lin.ini").string()}), 0);
  const auto m = read_metrics(dir.path() / "out" / "metrics.txt");
  EXPECT_NEAR(std::stod(m.at("r_min")), 1.0, 1e-9);
  EXPECT_EQ(m.at("theta_flat"), "true");
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "r_theta.csv"));
  EXPECT_EQ(parse_config(slurp(dir.path() / "out" / "config.ini")), load_config((dir.path() / "lin.ini").string()));
}

TEST(Cli, PropagateSpectrumAndConvert) {
  TempDir dir;
  spit(dir.path() / "c.ini", "[fiber]\nlength = 1\n[input]\nu0 = 1\n[grid]\nn_points = 256\n");
  const auto cfg = (dir.path() / "c.ini").string();
  ASSERT_EQ(run_cli({"propagate", "-c", cfg, "-o", (dir.path() / "p").string(), "--snapshot-stride", "50"}), 0);
  const auto traj = read_trajectory(dir.path() / "p" / "trajectory.vsqt");
  EXPECT_EQ(traj.steps, (std::vector<int>{0, 50, 100, 150, 200}));
  EXPECT_TRUE(fs::exists(dir.path() / "p" / "intensity_map.ppm"));
  ASSERT_EQ(run_cli({"spectrum", "-c", cfg, "-o", (dir.path() / "s").string()}), 0);
  EXPECT_EQ(read_metrics(dir.path() / "s" / "metrics.txt").at("spectral_maxima"), "1");
  EXPECT_TRUE(fs::exists(dir.path() / "s" / "spectrum.csv"));

  spit(dir.path() / "phys.ini",
       "[physical]\nt0 = 1\nbeta2_avg = -1\ngamma = 1\na_eff = 1\nlength = 2\n[beta2]\nbase = -1\nmodulation = sine\n"
       "period_m = 1.3\ndepth = 0.2\nsense = -1\n");
  ASSERT_EQ(run_cli({"convert", (dir.path() / "phys.ini").string(), "-o", (dir.path() / "n.txt").string()}), 0);
  const auto n = read_metrics(dir.path() / "n.txt");
  EXPECT_EQ(n.at("D.base"), "1");
  EXPECT_EQ(n.at("D.zeta_m"), "1.3");
  EXPECT_EQ(n.at("L"), "2");
}

TEST(Cli, ScenarioWritesArtifactsDeterministically) {
  TempDir dir;
  const auto a = (dir.path() / "a").string(), b = (dir.path() / "b").string();
  const std::vector<std::string> common{"scenario", "fig1", "--n-points", "512", "--steps", "300"};
  auto with = [&](const std::string& out, const std::string& threads) {
    auto args = common;
    for (const auto& s : {std::string("--out"), out, std::string("--threads"), threads}) args.push_back(s);
    return run_cli(args);
  };
  ASSERT_EQ(with(a, "1"), 0);
  ASSERT_EQ(with(b, "2"), 0);
  for (const auto* f : {"intensity_map.ppm", "intensity_map.csv", "spectrum.csv", "S_complete.txt", "S_complete.bin",
                        "S_complete.ppm", "metrics.txt", "config.ini"})
    EXPECT_TRUE(fs::exists(dir.path() / "a" / f)) << f;
  EXPECT_EQ(slurp(dir.path() / "a" / "S_complete.bin"), slurp(dir.path() / "b" / "S_complete.bin"));
  EXPECT_EQ(slurp(dir.path() / "a" / "S_complete.txt"), slurp(dir.path() / "b" / "S_complete.txt"));
}

TEST(Cli, CorrelateSelectsKindAndDomain) {
  TempDir dir;
  spit(dir.path() / "c.ini",
       "[fiber]\nlength = 2\n[dispersion]\nmodulation = sine\nzeta_m = 1.3\ndepth = 0.2\n[input]\nshape = pair\nu0 = 2\nT = 3\n"
       "dw = 1\n[grid]\nn_points = 512\n[measure]\ntime_slots = -10, 10, 20\n");
  const auto cfg = (dir.path() / "c.ini").string();
  ASSERT_EQ(run_cli({"correlate", "-c", cfg, "-o", (dir.path() / "t").string(), "--kind", "xy,xx"}), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "t" / "C_xy.bin"));
  EXPECT_TRUE(fs::exists(dir.path() / "t" / "C_xx.bin"));
  EXPECT_FALSE(fs::exists(dir.path() / "t" / "C_complete.bin"));
  const auto xy = read_matrix_text(dir.path() / "t" / "C_xy.txt");
  EXPECT_EQ(xy.size(), 20u);
  ASSERT_EQ(run_cli({"correlate", "-c", cfg, "-o", (dir.path() / "f").string(), "--domain", "frequency"}), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "f" / "S_complete.bin"));
  EXPECT_EQ(run_cli({"correlate", "-c", cfg, "-o", (dir.path() / "x").string(), "--kind", "zz"}), 1);
}
