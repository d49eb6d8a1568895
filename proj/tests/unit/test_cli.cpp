#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

const fs::path kData = DYNREG_TEST_DATA;

int run(const std::string& args) {
  const std::string cmd = std::string(DYNREG_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dynreg_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Cli, RunWritesTables) {
  const fs::path out = scratch("run");
  ASSERT_EQ(run("run --config " + (kData / "smoke.toml").string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "records.csv"));
  EXPECT_TRUE(fs::exists(out / "timings.csv"));
  EXPECT_TRUE(fs::exists(out / "traces" ));
  EXPECT_EQ(slurp(out / "records.csv").rfind("cell,algorithm,n,", 0), 0u);
}

TEST(Cli, RunIsByteStable) {
  const fs::path a = scratch("stable_a"), b = scratch("stable_b");
  ASSERT_EQ(run("run --config " + (kData / "smoke.toml").string() + " --out " + a.string()), 0);
  ASSERT_EQ(run("run --config " + (kData / "smoke.toml").string() + " --out " + b.string()), 0);
  EXPECT_EQ(slurp(a / "records.csv"), slurp(b / "records.csv"));
}

TEST(Cli, ScalingFitsAndPlots) {
  const fs::path out = scratch("scaling");
  ASSERT_EQ(run("scaling --fit --config " + (kData / "smoke.toml").string() + " --out " + out.string()), 0);
  EXPECT_EQ(slurp(out / "fits.csv").rfind("algorithm,slope,intercept,r2", 0), 0u);
  EXPECT_NE(slurp(out / "regret.svg").find("<svg"), std::string::npos);
}

TEST(Cli, OracleOnCsv) {
  const fs::path out = scratch("oracle");
  ASSERT_EQ(run("oracle --input " + (kData / "prices.csv").string() +
                " --columns close --time-column date --budget 4 --out " + (out / "sol.csv").string()),
            0);
  const std::string text = slurp(out / "sol.csv");
  EXPECT_EQ(text.rfind("# lambda=", 0), 0u);
  EXPECT_NE(text.find("t,u_1,s_1,gamma_minus_1,gamma_plus_1"), std::string::npos);
}

TEST(Cli, DemoWritesOverlay) {
  const fs::path out = scratch("demo");
  ASSERT_EQ(run("demo --input " + (kData / "prices.csv").string() +
                " --columns close --time-column date --lambda 0.5 --out " + (out / "demo.svg").string()),
            0);
  const std::string svg = slurp(out / "demo.svg");
  EXPECT_NE(svg.find("class=\"series\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"trend\""), std::string::npos);
}

TEST(Cli, ConfigErrorsExitOne) {
  const fs::path out = scratch("bad");
  EXPECT_EQ(run("run --config " + (kData / "bad_n.toml").string() + " --out " + out.string()), 1);
  EXPECT_EQ(run("run --config " + (kData / "no_such.toml").string()), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("oracle --input " + (kData / "nan_cell.csv").string() + " --time-column date --budget 1 --out " +
                (out / "x.csv").string()),
            1);
}

TEST(Cli, CellFailureExitsTwo) {
  const fs::path out = scratch("fail");
  EXPECT_EQ(run("run --config " + (kData / "failing_cell.toml").string() + " --out " + out.string()), 2);
  EXPECT_TRUE(fs::exists(out / "records.csv"));
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(run("--help"), 0);
}

}  // namespace
