#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "test_support.hpp"
#include "txmotif/cli.hpp"

namespace txmotif {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliData : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir;
    const auto r = run({"synth", "--days", "60", "--tx-per-day", "50", "--out-tx", tx(), "--out-prices", prices()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string tx() { return (*dir_ / "tx.csv").string(); }
  static std::string prices() { return (*dir_ / "px.csv").string(); }
  static std::string path(const std::string& name) { return (*dir_ / name).string(); }

  static testing::TempDir* dir_;
};
testing::TempDir* CliData::dir_ = nullptr;

TEST(Cli, WeightsPrinting) {
  EXPECT_EQ(run({"weights", "--r", "0.8", "--window", "3"}).out, "0.8 0.16 0.04\n");
  EXPECT_EQ(run({"weights"}).out, "1\n");
}

TEST(Cli, BadValuesAreDataErrors) {
  const auto r = run({"weights", "--r", "1.5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("BadDecay"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"weights", "--window", "three"}).code, 2);
  EXPECT_EQ(run({"backtest", "--tx", "x.csv"}).code, 2);  // --prices missing
}

TEST(Cli, HelpShowsDefaults) {
  const auto r = run({"backtest", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--train-fraction"), std::string::npos);
  EXPECT_NE(r.out.find("0.8"), std::string::npos);
  EXPECT_NE(r.out.find("TXMOTIF_K"), std::string::npos);
}

TEST(Cli, ConfigFileAndPrecedence) {
  testing::TempDir dir;
  const auto cfg = (dir / "run.conf").string();
  std::ofstream(cfg) << "# weights\nr = 0.5\nwindow=2\n";
  EXPECT_EQ(run({"weights", "--config", cfg}).out, "0.5 0.5\n");
  EXPECT_EQ(run({"weights", "--config", cfg, "--window", "1"}).out, "1\n");
  ::setenv("TXMOTIF_WINDOW", "3", 1);
  EXPECT_EQ(run({"weights", "--config", cfg}).out, "0.5 0.25 0.25\n");
  ::unsetenv("TXMOTIF_WINDOW");
  EXPECT_EQ(run({"weights", "--config", (dir / "missing.conf").string()}).code, 2);
}

TEST_F(CliData, FeaturesWidth) {
  const auto r = run({"features", "--tx", tx(), "--k", "2", "--out", path("f.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("f.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 800);
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 60);
}

TEST_F(CliData, MissingInputIsDataError) {
  const auto r = run({"features", "--tx", path("nope.csv"), "--out", path("f.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("MissingFile"), std::string::npos);
}

TEST_F(CliData, BacktestJsonToStdout) {
  const auto r = run({"backtest", "--tx", tx(), "--prices", prices(), "--k", "1", "--lambda", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("mape"));
  EXPECT_EQ(j.at("k"), 1);
  EXPECT_EQ(j.at("records").size(), 12u);
}

TEST_F(CliData, BacktestFilesAndSummary) {
  const auto r = run({"backtest", "--tx", tx(), "--prices", prices(), "--k", "1", "--window", "2", "--out",
                      path("report.json"), "--csv", path("report.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("MAPE"), std::string::npos);
  EXPECT_NE(r.out.find("runtime"), std::string::npos);
  std::ifstream csv(path("report.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "date,true,predicted");
}

TEST_F(CliData, TrainThenPredict) {
  auto r = run({"train", "--tx", tx(), "--prices", prices(), "--k", "1", "--window", "2", "--until", "2020-02-20",
                "--out", path("model.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"predict", "--model-file", path("model.json"), "--tx", tx(), "--prices", prices(), "--date", "2020-02-25"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_GT(j.at("predicted").get<double>(), 0.0);
  EXPECT_EQ(j.at("estimates").size(), 2u);
  r = run({"predict", "--model-file", path("model.json"), "--tx", tx(), "--prices", prices(), "--date", "2020-01-01"});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliData, Sweeps) {
  auto r = run({"sweep-horizon", "--tx", tx(), "--prices", prices(), "--k", "1", "--horizons", "1,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("horizon  MAPE"), std::string::npos);
  r = run({"sweep-window", "--tx", tx(), "--prices", prices(), "--k", "1", "--windows", "1,3", "--out",
           path("sw.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("sw.json"));
  EXPECT_EQ(nlohmann::json::parse(in).at("points").size(), 2u);
}

TEST_F(CliData, OracleCheck) {
  const auto r = run({"oracle-check", "--tx", tx(), "--k", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("all equal"), std::string::npos);
}

}  // namespace
}  // namespace txmotif
