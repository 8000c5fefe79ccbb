#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(GMANOVA_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gmanova_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path data_file(const std::vector<std::pair<std::string, int>>& groups, int p, double shift = 0.0) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    const fs::path path = dir_ / "data.csv";
    std::ofstream out(path);
    bool first = true;
    for (const auto& [label, n] : groups) {
      for (int i = 0; i < n; ++i) {
        out << label;
        for (int c = 0; c < p; ++c) out << ',' << n01(rng) + (first ? shift : 0.0);
        out << '\n';
      }
      first = false;
    }
    return path;
  }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, TestVerbWritesReport) {
  const fs::path data = data_file({{"ctl", 10}, {"trt", 12}}, 15, 1.0);
  const fs::path out = dir_ / "r.json";
  const CliRun r = run_cli("test --data " + data.string() + " --scenario one-way --alpha 0.05 --diagnostics --out " +
                        out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  EXPECT_TRUE(j.at("reject").get<bool>());
  EXPECT_EQ(j.at("groups"), nlohmann::json({"ctl", "trt"}));
  EXPECT_EQ(j.at("scenario"), "one-way");
  EXPECT_FALSE(j.at("diagnostics").is_null());
}

TEST_F(CliTest, SmallGroupNamesLabel) {
  const fs::path data = data_file({{"ctl", 10}, {"tiny", 3}}, 4);
  const CliRun r = run_cli("test --data " + data.string() + " --scenario one-way");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("tiny"), std::string::npos) << r.output;
}

TEST_F(CliTest, BadCellReportsRowAndColumn) {
  const fs::path data = write("bad.csv", "a,1,2\na,1,2\na,1,2\na,1,oops\n");
  const CliRun r = run_cli("test --data " + data.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("row 4"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("column 3"), std::string::npos) << r.output;
}

TEST_F(CliTest, DegenerateVarianceExitCode) {
  std::ofstream out(dir_ / "flat.csv");
  for (int g = 0; g < 2; ++g)
    for (int i = 0; i < 5; ++i) out << (g ? "b" : "a") << ",1,2,3\n";
  out.close();
  const CliRun r = run_cli("test --data " + (dir_ / "flat.csv").string());
  EXPECT_EQ(r.code, 4) << r.output;
}

TEST_F(CliTest, ScenarioEmitAndDesignRoundTrip) {
  CliRun r = run_cli("scenario --name one-way --groups 10,12 --p 15 --emit " + (dir_ / "design").string());
  ASSERT_EQ(r.code, 0) << r.output;
  ASSERT_TRUE(fs::exists(dir_ / "design" / "design.json"));
  const fs::path data = data_file({{"ctl", 10}, {"trt", 12}}, 15);
  r = run_cli("test --data " + data.string() + " --design " + (dir_ / "design" / "design.json").string() +
              " --out " + (dir_ / "a.json").string());
  ASSERT_EQ(r.code, 0) << r.output;
  r = run_cli("test --data " + data.string() + " --out " + (dir_ / "b.json").string());
  ASSERT_EQ(r.code, 0) << r.output;
  std::ifstream a(dir_ / "a.json"), b(dir_ / "b.json");
  EXPECT_EQ(nlohmann::json::parse(a).at("z"), nlohmann::json::parse(b).at("z"));
}

TEST_F(CliTest, DesignDimensionMismatch) {
  ASSERT_EQ(run_cli("scenario --name one-way --groups 10,12 --p 6 --emit " + (dir_ / "design").string()).code, 0);
  const fs::path data = data_file({{"ctl", 10}, {"trt", 12}}, 15);
  const CliRun r = run_cli("test --data " + data.string() + " --design " + (dir_ / "design" / "design.json").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("15"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("6"), std::string::npos) << r.output;
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const fs::path cfg = write("exp.json", R"({
    "scenario": {"name": "growth-curve", "group_sizes": [8, 9], "p": 10, "degree": 2},
    "distribution": {"kind": "standardized_gamma", "shape": 2},
    "covariance": [{"kind": "identity"}, {"kind": "compound_symmetry", "rho": 0.3}],
    "theta": {"kind": "signal_ray", "ratio": 1.5},
    "reps": 150, "seed": 3
  })");
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + (dir_ / "s1.json").string()).code, 0);
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + (dir_ / "s2.json").string()).code, 0);
  std::ifstream a(dir_ / "s1.json"), b(dir_ / "s2.json");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str().find("predicted_power"), std::string::npos);
}

TEST_F(CliTest, DiagnosePasses) {
  const fs::path cfg = write("exp.json", R"({
    "scenario": {"name": "one-way", "group_sizes": [5, 6, 7], "p": 4},
    "reps": 100
  })");
  const CliRun r = run_cli("diagnose --config " + cfg.string());
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(r.output.find("FAIL"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("permutation"), std::string::npos) << r.output;
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const fs::path cfg = write("exp.json", R"({"scenario": {"name": "one-way", "group_sizes": [5, 6], "p": 4}, "bogus": 1})");
  const CliRun r = run_cli("simulate --config " + cfg.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("bogus"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("exp.json"), std::string::npos) << r.output;
  EXPECT_EQ(run_cli("frobnicate").code, 2);
}

TEST_F(CliTest, NoBalancingSolutionExitThree) {
  // Observation 1 has its own parameter (leverage 1) and the hypothesis tests
  // exactly that parameter, so its balancing equation reads 0 = h_11 > 0.
  std::ofstream(dir_ / "A.csv") << "1,0,1\n1,0,0\n1,0,0\n1,0,0\n1,0,0\n0,1,0\n0,1,0\n0,1,0\n0,1,0\n0,1,0\n";
  std::ofstream(dir_ / "B.csv") << "1,0\n0,1\n";
  std::ofstream(dir_ / "L.csv") << "0,0,1\n";
  std::ofstream(dir_ / "R.csv") << "1,0\n0,1\n";
  write("design.json", R"({"A":"A.csv","B":"B.csv","L":"L.csv","R":"R.csv","group_sizes":[5,5]})");
  const fs::path data = data_file({{"a", 5}, {"b", 5}}, 2);
  const CliRun r = run_cli("test --data " + data.string() + " --design " + (dir_ / "design.json").string());
  EXPECT_EQ(r.code, 3) << r.output;
  EXPECT_NE(r.output.find("NoBalancingSolution"), std::string::npos) << r.output;
}

}  // namespace
