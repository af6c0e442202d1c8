#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "runner.hpp"
#include "translocal/errors.hpp"

using namespace translocal;

namespace {

std::string write_ini(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("translocal_test_" + name + ".ini");
  std::ofstream(p) << body;
  return p.string();
}

std::string config_error(const std::string& body) {
  try {
    cli::load_config(write_ini("bad", body));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DiagnosticsNameSectionAndKey) {
  EXPECT_NE(config_error("[experiment:a]\nkind = kraft\nlengths = 1,2\ncolour = red\n").find("colour"), std::string::npos);
  EXPECT_NE(config_error("[experiment:a]\nkind = sorcery\n").find("sorcery"), std::string::npos);
  EXPECT_NE(config_error("[experiment:a]\nkind = translocal\nsystem = nosuch\nomega = 0.5\npoints = 0.3\n").find("nosuch"),
            std::string::npos);
  EXPECT_NE(config_error("[weird]\nx = 1\n").find("weird"), std::string::npos);
  EXPECT_NE(config_error("[experiment:a]\nkind = translocal\nsystem = tripling\nomega = abc\npoints = 0.3\n").find("omega"),
            std::string::npos);
  EXPECT_FALSE(config_error("[experiment:a\nkind = kraft\n").empty());
  EXPECT_THROW(cli::load_config("/nonexistent/dir/x.ini"), ConfigError);
}

TEST(Config, BudgetCapApplies) {
  const auto cfg = cli::load_config(write_ini("cap", "[experiment:a]\nkind = translocal\nsystem = tripling\n"
                                                     "omega = 0.5\npoints = 0.3\nbudget = 1000000\n"),
                                    5000);
  ASSERT_EQ(cfg.experiments.size(), 1u);
  EXPECT_EQ(cfg.experiments[0].schedule.budget, 5000u);
}

TEST(Run, KraftRow) {
  const auto rep = cli::run(cli::load_config(write_ini("kraft", "[experiment:k]\nkind = kraft\nlengths = 1, 2\n")));
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_NEAR(rep.rows[0].value, std::log((1 + std::sqrt(5.0)) / 2), 1e-9);
  ASSERT_TRUE(rep.rows[0].rel_error.has_value());
  EXPECT_LT(*rep.rows[0].rel_error, 1e-9);
  EXPECT_TRUE(rep.passed);
  const auto csv = cli::to_csv(rep.rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), cli::kCsvHeader);
}

TEST(Run, SweepIsDeterministicAcrossThreadCounts) {
  const std::string body =
      "[experiment:t]\nkind = translocal\nsystem = tripling\nomega = 0, 0.5\npoints = 0.3; 0.71\n"
      "n_min = 5\nn_max = 8\nepsilon = 0.05, 0.02\n[experiment:l]\nkind = lyapunov\nsystem = tripling\n"
      "random_points = 3\nseed = 9\nlyapunov_n = 200\n";
  auto one = cli::load_config(write_ini("det1", body));
  auto two = cli::load_config(write_ini("det2", body + "[output]\nthreads = 2\n"));
  EXPECT_EQ(two.threads, 2u);
  const auto a = cli::run(one), b = cli::run(two), c = cli::run(one);
  EXPECT_EQ(cli::to_csv(a.rows), cli::to_csv(b.rows));
  EXPECT_EQ(cli::to_csv(a.rows), cli::to_csv(c.rows));
  EXPECT_EQ(a.rows.size(), 7u);
  for (const auto& r : a.rows) EXPECT_TRUE(r.passed) << r.experiment << " " << r.point;
  EXPECT_EQ(a.summary["experiments"].size(), 2u);
}

TEST(Run, UserExpectedOverridesAndFails) {
  const auto rep = cli::run(cli::load_config(
      write_ini("exp", "[experiment:k]\nkind = kraft\nlengths = 1, 1\nexpected = 1.0\ntolerance = 0.01\n")));
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_FALSE(rep.rows[0].passed);
  EXPECT_FALSE(rep.passed);
}

TEST(Catalogue, ListsSystems) {
  const auto s = cli::list_catalogue();
  for (const char* id : {"tripling", "g3branch", "pomeau-manneville", "sqrtmap", "staircase", "disk", "fullshift"})
    EXPECT_NE(s.find(id), std::string::npos) << id;
}
