#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(IRS_SIM_PATH) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = ::pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("irs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    config_ = (dir_ / "tiny.yaml").string();
    std::ofstream(config_) << R"(seed: 5
scenario:
  ap_antennas: 2
  irs_elements: [2, 2]
  users:
    - [2, 50, 0]
experiment:
  schemes: [tts-pdd, no-irs]
  q: [1]
  slots: 3
  trials: 2
)";
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::string config_;
};

TEST_F(Cli, RunWritesCsv) {
  const fs::path out = dir_ / "out.csv";
  const Outcome o = run("--quiet run --config " + config_ + " --out " + out.string());
  ASSERT_EQ(o.code, 0) << o.out;
  const std::string csv = read(out);
  EXPECT_EQ(csv.rfind("sweep_value,scheme,q,user_rates,weighted_sum_rate,std_error\n", 0), 0u);
  EXPECT_NE(csv.find(",tts-pdd,1,"), std::string::npos);
  EXPECT_NE(csv.find(",no-irs,-,"), std::string::npos);
}

TEST_F(Cli, SeedFlagIsDeterministicAndOverridesConfig) {
  const Outcome a = run("--quiet --seed 17 run --config " + config_);
  const Outcome b = run("--quiet --seed 17 run --config " + config_);
  const Outcome c = run("--quiet run --config " + config_);
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST_F(Cli, EnvSeedIsBelowFlag) {
  ::setenv("IRS_SEED", "17", 1);
  const Outcome env = run("--quiet run --config " + config_);
  const Outcome flag = run("--quiet --seed 5 run --config " + config_);
  ::unsetenv("IRS_SEED");
  const Outcome flag17 = run("--quiet --seed 17 run --config " + config_);
  const Outcome cfg = run("--quiet run --config " + config_);
  EXPECT_EQ(env.out, flag17.out);
  EXPECT_EQ(flag.out, cfg.out);
}

TEST_F(Cli, TimingColumn) {
  const Outcome o = run("--quiet run --timing --config " + config_);
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find(",wall_time\n"), std::string::npos);
}

TEST_F(Cli, SweepOverridesGrid) {
  const Outcome o = run("--quiet sweep --config " + config_ + " --var P --grid 0,10");
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("\n0,no-irs"), std::string::npos);
  EXPECT_NE(o.out.find("\n10,no-irs"), std::string::npos);
}

TEST_F(Cli, ConvergenceTrace) {
  const Outcome o = run("--quiet convergence --config " + config_ + " --scheme tts-pdd --q 1");
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_EQ(o.out.rfind("outer_iter,inner_iter,al_value,objective,violation_inf_norm\n", 0), 0u);
}

TEST_F(Cli, ValidatePasses) {
  const Outcome o = run("validate --config " + config_);
  EXPECT_EQ(o.code, 0) << o.out;
}

TEST_F(Cli, ErrorExitCodes) {
  Outcome o = run("run --config " + (dir_ / "missing.yaml").string());
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("missing.yaml"), std::string::npos);
  EXPECT_EQ(run("run --config " + config_ + " --frobnicate").code, 1);
  EXPECT_EQ(run("run").code, 1);
  std::ofstream(dir_ / "bad.yaml") << "scenario:\n  ap_antennas: -1\nexperiment:\n  schemes: [no-irs]\n";
  EXPECT_EQ(run("run --config " + (dir_ / "bad.yaml").string()).code, 1);
  EXPECT_EQ(run("sweep --config " + config_ + " --var nope --grid 1").code, 1);
}

}  // namespace
