#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "tumorfa/cli.hpp"
#include "tumorfa/io.hpp"

using namespace tumorfa;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(::testing::TempDir()) / (std::string("tumorfa_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return cli_main(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void simulate_small() {
    ASSERT_EQ(run({"simulate", "--seed", "7", "--snvs", "20", "--samples", "4", "-o", path("data")}), 0)
        << err_.str();
  }

  std::vector<std::string> quick_fit(const std::string& out) {
    return {"fit", "-d", path("data/counts.tsv"), "-o", path(out), "--iterations", "300", "--burn-in", "100",
            "--thin", "5", "--chains", "2", "--seed", "3"};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"fit", "--no-such-flag"}), 2);
  EXPECT_NE(err_.str().find("Usage"), std::string::npos);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({"fit", "--paper-config", "--pdac-config"}), 2);
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_NE(out_.str().find("simulate"), std::string::npos);
}

TEST_F(CliTest, FitWithoutDataFails) {
  EXPECT_EQ(run({"fit", "-d", path("absent.tsv"), "-o", path("run")}), 1);
  EXPECT_NE(err_.str().find("data file not found"), std::string::npos) << err_.str();
  EXPECT_EQ(run({"fit", "-o", path("run")}), 1);
  EXPECT_NE(err_.str().find("data file is not set"), std::string::npos) << err_.str();
}

TEST_F(CliTest, SimulateWritesReadableData) {
  simulate_small();
  const auto data = read_counts(dir_ / "data/counts.tsv");
  EXPECT_EQ(data.num_snvs(), 20u);
  EXPECT_EQ(data.num_samples(), 4u);
  const auto truth = read_truth(dir_ / "data/truth.json");
  EXPECT_EQ(truth.Z_true.rows(), 20u);
  EXPECT_EQ(run({"simulate", "--noise", "snv", "-o", path("noisy")}), 0);
  EXPECT_TRUE(read_truth(dir_ / "noisy/truth.json").per_snv_noise.has_value());
  EXPECT_EQ(run({"simulate", "--noise", "loud", "-o", path("x")}), 2);
}

TEST_F(CliTest, FitIsDeterministicAndSummarizable) {
  simulate_small();
  ASSERT_EQ(run(quick_fit("run1")), 0) << err_.str();
  ASSERT_EQ(run(quick_fit("run2")), 0) << err_.str();
  for (const char* f : {"posterior_C.csv", "Z_star.csv", "w_star.csv", "fit.json", "run_config.txt",
                        "chain_0/scalars.csv", "chain_0/states.txt", "chain_1/meta.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run1" / f)) << f;
  }
  EXPECT_EQ(slurp(dir_ / "run1/fit.json"), slurp(dir_ / "run2/fit.json"));

  ASSERT_EQ(run({"summarize", "-r", path("run1"), "-o", path("resummary")}), 0) << err_.str();
  EXPECT_EQ(slurp(dir_ / "run1/posterior_C.csv"), slurp(dir_ / "resummary/posterior_C.csv"));
  EXPECT_EQ(slurp(dir_ / "run1/Z_star.csv"), slurp(dir_ / "resummary/Z_star.csv"));
  const auto back = read_summary(dir_ / "resummary");
  EXPECT_EQ(back.Z_star.rows(), 20u);

  ASSERT_EQ(run({"diagnose", "-r", path("run1")}), 0) << err_.str();
  const auto acc = slurp(dir_ / "run1/acceptance.csv");
  EXPECT_NE(acc.find("row_accept_rate"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "run1/diagnostics.csv").find("geweke_z"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "run1/trace.csv").find("\n1,"), std::string::npos);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  simulate_small();
  {
    std::ofstream cfg(dir_ / "run.cfg");
    cfg << "mcmc.iterations = 250\nmcmc.burn_in = 50\nhyperparams.alpha = 2.5\ndata_path = "
        << path("data/counts.tsv") << "\n";
  }
  ASSERT_EQ(run({"fit", "--config", path("run.cfg"), "-o", path("run"), "--iterations", "200"}), 0) << err_.str();
  const auto stored = slurp(dir_ / "run/run_config.txt");
  EXPECT_NE(stored.find("mcmc.iterations = 200\n"), std::string::npos);
  EXPECT_NE(stored.find("mcmc.burn_in = 50\n"), std::string::npos);
  EXPECT_NE(stored.find("hyperparams.alpha = 2.5\n"), std::string::npos);
}

TEST_F(CliTest, PresetsSetHyperparameters) {
  simulate_small();
  auto args = quick_fit("pdac");
  args.push_back("--pdac-config");
  ASSERT_EQ(run(args), 0) << err_.str();
  const auto stored = slurp(dir_ / "pdac/run_config.txt");
  EXPECT_NE(stored.find("hyperparams.alpha = 1\n"), std::string::npos);
  EXPECT_NE(stored.find("hyperparams.a00 = 5\n"), std::string::npos);
  EXPECT_NE(stored.find("hyperparams.b00 = 95\n"), std::string::npos);

  args = quick_fit("paper");
  args.push_back("--paper-config");
  args.push_back("--c-max");
  args.push_back("6");
  ASSERT_EQ(run(args), 0) << err_.str();
  const auto paper = slurp(dir_ / "paper/run_config.txt");
  EXPECT_NE(paper.find("hyperparams.alpha = 3\n"), std::string::npos);
  EXPECT_NE(paper.find("hyperparams.c_max = 6\n"), std::string::npos);
}

TEST_F(CliTest, SummarizeMissingRunFails) {
  EXPECT_EQ(run({"summarize", "-r", path("nothing")}), 1);
  EXPECT_NE(err_.str().find("not found"), std::string::npos);
}
