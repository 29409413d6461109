#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace wavebound::cli {
namespace {

using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

/// Data rows of a CSV document (header comment and column line removed).
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  int n = 0;
  while (std::getline(is, line)) {
    if (n++ < 2) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

struct DensityGrid {
  std::vector<double> xs, ys;
  std::vector<std::vector<double>> rho;  // rho[i][j] at (xs[i], ys[j])
};

DensityGrid parse_density(const std::string& text) {
  DensityGrid g;
  for (const auto& r : csv_rows(text)) {
    const double x = std::stod(r[0]), y = std::stod(r[1]), v = std::stod(r[2]);
    if (g.xs.empty() || g.xs.back() != x) {
      g.xs.push_back(x);
      g.rho.emplace_back();
    }
    if (g.xs.size() == 1) g.ys.push_back(y);
    g.rho.back().push_back(v);
  }
  return g;
}

double simpson(const std::vector<double>& f, double h) {
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

/// Integral over y of the density column at index i.
double column_mass(const DensityGrid& g, std::size_t i) { return simpson(g.rho[i], g.ys[1] - g.ys[0]); }

double mass_between(const DensityGrid& g, std::size_t lo, std::size_t hi) {
  std::vector<double> columns;
  for (std::size_t i = lo; i <= hi; ++i) columns.push_back(column_mass(g, i));
  return simpson(columns, g.xs[1] - g.xs[0]);
}

TEST(Cli, SpectrumModelAHalf) {
  const Outcome r = invoke({"spectrum", "--model", "A", "--lambda", "0.5", "--modes", "32"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out.rfind("# wavebound-csv v1\nlambda,branch_index,eigenvalue_over_mu,residual,stable\n", 0), 0u);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0][1], "1");
  const double e = std::stod(rows[0][2]);
  EXPECT_GT(e, 0.0);
  EXPECT_LT(e, 1.0);
  EXPECT_EQ(rows[0][4], "1");
}

TEST(Cli, SpectrumBelowThresholdIsEmptyButSuccessful) {
  const Outcome r = invoke({"spectrum", "--model", "A", "--lambda", "0.2", "--modes", "32"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(csv_rows(r.out).empty());
}

TEST(Cli, SpectrumModelBHasState) {
  const Outcome r = invoke({"spectrum", "--model", "B", "--lambda", "0.1", "--modes", "32"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_GE(csv_rows(r.out).size(), 1u);
}

TEST(Cli, DeltaAndWidthGiveSameRatio) {
  const Outcome a = invoke({"spectrum", "--lambda", "0.5", "--modes", "24"});
  const Outcome b = invoke({"spectrum", "--delta", "1.0", "--d", "2.0", "--modes", "24"});
  ASSERT_EQ(a.code, kOk);
  ASSERT_EQ(b.code, kOk);
  EXPECT_NEAR(std::stod(csv_rows(a.out)[0][2]), std::stod(csv_rows(b.out)[0][2]), 1e-9);
}

TEST(Cli, BoundsRows) {
  const Outcome r = invoke({"bounds", "--lambda", "2.5"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][1], "2");
  EXPECT_EQ(rows[0][2], "3");
  EXPECT_NEAR(std::stod(rows[1][4]), 0.16, 1e-12);
  EXPECT_NEAR(std::stod(rows[1][5]), 0.64, 1e-12);
  EXPECT_EQ(rows[2][6], "1");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"spectrum", "--lambda", "0.5", "--delta", "0.5"}).code, kBadConfig);
  EXPECT_EQ(invoke({"spectrum"}).code, kBadConfig);
  EXPECT_EQ(invoke({"spectrum", "--lambda", "-1"}).code, kBadConfig);
  EXPECT_EQ(invoke({"spectrum", "--lambda", "0.5", "--modes", "2"}).code, kBadConfig);
  EXPECT_EQ(invoke({"frobnicate", "--lambda", "0.5"}).code, kBadConfig);
  EXPECT_EQ(invoke({"spectrum", "--lambda", "0.5", "--model", "C"}).code, kBadConfig);
  EXPECT_EQ(invoke({"spectrum", "--lambda", "0.5", "--unknown"}).code, kBadConfig);
  const Outcome missing = invoke({"field", "--lambda", "0.5", "--modes", "24", "--branch", "2"});
  EXPECT_EQ(missing.code, kMissingBranch);
  EXPECT_NE(missing.err.find("branch 2"), std::string::npos);
  EXPECT_EQ(invoke({"field", "--lambda", "0.2", "--modes", "24"}).code, kMissingBranch);
}

TEST(Cli, HelpIsNotAnError) {
  const Outcome r = invoke({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("--modes"), std::string::npos);
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("wavebound_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

using CliFiles = TempDir;

TEST_F(CliFiles, ConfigFileAndOverride) {
  const auto cfg = dir_ / "run.ini";
  std::ofstream(cfg) << "model=B\nlambda=0.5\nmodes=24\n";
  const Outcome from_file = invoke({"spectrum", "--config", cfg.string(), "--format", "json"});
  ASSERT_EQ(from_file.code, kOk) << from_file.err;
  EXPECT_EQ(json::parse(from_file.out)["config"]["model"], "B");
  const Outcome overridden = invoke({"spectrum", "--config", cfg.string(), "--model", "A", "--format", "json"});
  ASSERT_EQ(overridden.code, kOk) << overridden.err;
  const json doc = json::parse(overridden.out);
  EXPECT_EQ(doc["config"]["model"], "A");
  EXPECT_EQ(doc["config"]["modes"], 24);

  const auto bad = dir_ / "bad.ini";
  std::ofstream(bad) << "lambda=0.5\ncolour=blue\n";
  EXPECT_EQ(invoke({"spectrum", "--config", bad.string()}).code, kBadConfig);
}

TEST_F(CliFiles, OutputFileMatchesStandardOutput) {
  const auto path = dir_ / "spectrum.csv";
  const Outcome to_stdout = invoke({"spectrum", "--lambda", "0.5", "--modes", "24"});
  const Outcome to_file = invoke({"spectrum", "--lambda", "0.5", "--modes", "24", "--out", path.string()});
  ASSERT_EQ(to_file.code, kOk);
  EXPECT_TRUE(to_file.out.empty());
  std::ifstream in(path);
  const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(written, to_stdout.out);
  EXPECT_EQ(invoke({"spectrum", "--lambda", "0.5", "--out", (dir_ / "no" / "such" / "x.csv").string()}).code,
            kBadConfig);
}

TEST(Cli, JsonIsDeterministicAndStructured) {
  const std::vector<std::string> args{"spectrum", "--lambda", "0.5", "--modes", "24", "--format", "json"};
  const Outcome a = invoke(args);
  const Outcome b = invoke(args);
  ASSERT_EQ(a.code, kOk);
  EXPECT_EQ(a.out, b.out);
  const json doc = json::parse(a.out);
  EXPECT_EQ(doc["provenance"]["tool"], "wavebound");
  EXPECT_EQ(doc["config"]["lambda"], 0.5);
  ASSERT_EQ(doc["results"]["spectrum"].size(), 1u);
  EXPECT_EQ(doc["results"]["spectrum"][0]["branch_index"], 1);
  EXPECT_TRUE(doc["results"]["spectrum"][0]["stable"].get<bool>());
}

TEST(Cli, SweepRowsMatchSpectrumAtEachPoint) {
  const Outcome sweep = invoke({"sweep", "--model", "B", "--lambda-lo", "0.5", "--lambda-hi", "1.0", "--step", "0.5",
                                "--modes", "20", "--jobs", "2"});
  ASSERT_EQ(sweep.code, kOk) << sweep.err;
  const Outcome one = invoke({"spectrum", "--model", "B", "--lambda", "1.0", "--modes", "20"});
  const auto all = csv_rows(sweep.out);
  const auto single = csv_rows(one.out);
  std::vector<std::vector<std::string>> at_one;
  std::copy_if(all.begin(), all.end(), std::back_inserter(at_one), [](const auto& r) { return r[0] == "1"; });
  EXPECT_EQ(at_one, single);
  EXPECT_GT(all.size(), single.size());
}

TEST(Cli, FieldVanishesOnDirichletWallsAndIsNormalized) {
  // lambda = 0.5: x in [-6.5, 6.5] with spacing 0.0325, y spacing 0.025.
  const Outcome r = invoke({"field", "--lambda", "0.5", "--modes", "32", "--nx", "401", "--ny", "41",
                            "--x-halfwidth", "6.5"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const DensityGrid g = parse_density(r.out);
  ASSERT_EQ(g.xs.size(), 401u);
  ASSERT_EQ(g.ys.size(), 41u);
  for (std::size_t i = 0; i < g.xs.size(); ++i) {
    if (g.xs[i] < -0.5) EXPECT_LE(g.rho[i].front(), 1e-8) << g.xs[i];
    if (g.xs[i] > 0.5) EXPECT_LE(g.rho[i].back(), 1e-8) << g.xs[i];
  }
  // Beyond the window only the lowest transverse mode survives, so the
  // column mass decays like exp(-2 kappa |x|) and the tails integrate to
  // column_mass / (2 kappa).
  const double e = std::stod(csv_rows(invoke({"spectrum", "--lambda", "0.5", "--modes", "32"}).out)[0][2]);
  const double kappa = std::numbers::pi / 2.0 * std::sqrt(1.0 - e);
  const double inner = mass_between(g, 0, g.xs.size() - 1);
  const double tails = (column_mass(g, 0) + column_mass(g, g.xs.size() - 1)) / (2.0 * kappa);
  EXPECT_NEAR(inner + tails, 1.0, 1e-4);
}

TEST(Cli, FieldNearThresholdIsWeaklyBound) {
  auto density = [](const std::string& lambda) {
    const Outcome r = invoke({"field", "--lambda", lambda, "--modes", "32", "--nx", "201", "--ny", "21",
                              "--x-halfwidth", "5"});
    EXPECT_EQ(r.code, kOk) << r.err;
    return parse_density(r.out);
  };
  const DensityGrid deep = density("0.5");
  const DensityGrid weak = density("0.27");
  auto peak = [](const DensityGrid& g, double& x_at) {
    double best = -1.0;
    for (std::size_t i = 0; i < g.xs.size(); ++i)
      for (double v : g.rho[i])
        if (v > best) {
          best = v;
          x_at = g.xs[i];
        }
    return best;
  };
  double x_deep = 0.0, x_weak = 0.0;
  const double p_deep = peak(deep, x_deep);
  const double p_weak = peak(weak, x_weak);
  // The peak stays next to the window (within one strip width of it) ...
  EXPECT_LE(std::abs(x_deep), 0.5 + 1.0);
  EXPECT_LE(std::abs(x_weak), 0.27 + 1.0);
  // ... but near the emergence point it is far lower and the state spreads
  // out: less of its mass sits in |x| <= 2.
  EXPECT_LT(p_weak, 0.2 * p_deep);
  auto central = [](const DensityGrid& g) {
    const auto lo = static_cast<std::size_t>(std::find_if(g.xs.begin(), g.xs.end(), [](double x) { return x >= -2.0 - 1e-9; }) -
                                             g.xs.begin());
    return mass_between(g, lo, g.xs.size() - 1 - lo);
  };
  EXPECT_LT(central(weak), 0.5 * central(deep));
}

TEST(Cli, ThresholdsTable) {
  const Outcome r = invoke({"thresholds", "--modes", "32", "--format", "json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json res = json::parse(r.out)["results"];
  EXPECT_GT(res["lambda1"].get<double>(), 0.075);
  EXPECT_LT(res["lambda1"].get<double>(), 0.085);
  EXPECT_GT(res["lambda2"].get<double>(), 0.33);
  EXPECT_LT(res["lambda2"].get<double>(), 0.35);
  EXPECT_GT(res["lambda0_numeric"].get<double>(), 0.25);
  EXPECT_LT(res["lambda0_numeric"].get<double>(), 0.27);
  EXPECT_TRUE(res["ordering_ok"].get<bool>());
}

TEST(Cli, OracleAgreesWithModeMatching) {
  const Outcome r = invoke({"oracle", "--lambda", "0.5", "--modes", "32", "--spacings", "0.05,0.025,0.0125",
                            "--half-length", "8"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[3][0], "richardson");
  EXPECT_EQ(rows[4][0], "modematch");
  EXPECT_NEAR(std::stod(rows[3][2]), std::stod(rows[4][2]), 2e-3);
}

TEST(Cli, AnalyzeReportsSquareRootCorners) {
  const Outcome r = invoke({"analyze", "--lambda", "0.5", "--modes", "32"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "monotonicity");
  EXPECT_EQ(rows[0][3], "1");
  EXPECT_EQ(rows[1][0], "scaling");
  EXPECT_EQ(rows[1][3], "1");
  for (std::size_t i = 2; i < 4; ++i) {
    EXPECT_EQ(rows[i][0], "corner_exponent");
    EXPECT_NEAR(std::stod(rows[i][3]), 0.5, 0.05);
  }
}

}  // namespace
}  // namespace wavebound::cli
