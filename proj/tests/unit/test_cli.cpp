#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "bnx/io.hpp"
#include "cli.hpp"

namespace bnx {
namespace {

const std::string kData = BNX_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("bnx_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

TEST_F(CliTest, CompileWritesDiagramAndReportsSize) {
  const auto r = run({"compile", "--model", kData + "/admissions.json", "--out", path("a.odd")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "order W,F,E,G\nsize 8\nmodels 6\n");
  EXPECT_EQ(read_text_file(path("a.odd")), read_text_file(kData + "/admissions.odd"));
}

TEST_F(CliTest, CompileHonoursOrder) {
  const auto r = run({"compile", "--model", kData + "/admissions.json", "--order", "G,E,F,W", "--out", path("a.odd"),
                      "--dot", path("a.dot")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 14), "order G,E,F,W\n");
  EXPECT_TRUE(std::filesystem::exists(path("a.dot")));
}

TEST_F(CliTest, ExplainMcOnAdmissions) {
  const auto r = run({"explain", "--odd", kData + "/admissions.odd", "--instance", "+ + + +", "--kind", "mc"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "+ - - +\ncount 1\n");
}

TEST_F(CliTest, ExplainPiOnAdmissions) {
  const auto r = run({"explain", "--odd", kData + "/admissions.odd", "--instance", "+ + - -", "--kind", "pi"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "* * - -\ncount 1\n");
}

TEST_F(CliTest, ExplainPiHistogramAndShortest) {
  const auto full = run({"explain", "--odd", kData + "/admissions.odd", "--instance", "+ + + +", "--kind", "pi",
                         "--histogram"});
  ASSERT_EQ(full.code, 0);
  EXPECT_EQ(full.out, "+ + + *\n+ * * +\n* + + +\ncount 3\nlength count\n2 1\n3 2\n");
  const auto shortest = run({"explain", "--odd", kData + "/admissions.odd", "--instance", "+ + + +", "--kind", "pi",
                             "--shortest"});
  EXPECT_EQ(shortest.out, "+ * * +\ncount 1\n");
}

TEST_F(CliTest, OutputIsDeterministic) {
  const std::vector<std::string> args{"explain", "--odd", kData + "/admissions.odd", "--instance", "- + + +",
                                      "--kind", "pi", "--histogram"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST_F(CliTest, CheckMonotone) {
  const auto r = run({"check-monotone", "--odd", kData + "/admissions.odd"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "monotone\n");
  const auto flipped = run({"check-monotone", "--odd", kData + "/admissions.odd", "--flip", "W"});
  EXPECT_EQ(flipped.code, 0);
  EXPECT_EQ(flipped.out.substr(0, 13), "not monotone\n");
  EXPECT_NE(flipped.out.find("violating W"), std::string::npos);
}

TEST_F(CliTest, Stats) {
  const auto r = run({"stats", "--odd", kData + "/admissions.odd"});
  EXPECT_EQ(r.out, "mode reduced\nvariables 4\nsize 8\nmodels 6\n");
  const auto m = run({"stats", "--model", kData + "/latent_tree.json"});
  EXPECT_EQ(m.code, 0);
  EXPECT_NE(m.out.find("kind latent_tree"), std::string::npos);
  EXPECT_EQ(run({"stats"}).code, 2);
}

TEST_F(CliTest, TrainReportsAccuracy) {
  const auto r = run({"train", "--csv", kData + "/votes_synthetic.csv", "--smoothing", "1", "--out", path("v.json"),
                      "--positive", "democrat"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 9), "rows 435\n");
  EXPECT_NE(r.out.find("accuracy 0."), std::string::npos);
  EXPECT_EQ(read_text_file(path("v.json")), read_text_file(kData + "/votes_synthetic.json"));
}

TEST_F(CliTest, VerifyRandom16Succeeds) {
  const auto r = run({"verify", "--model", kData + "/random16.json"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("pointwise ok 65536"), std::string::npos);
}

TEST_F(CliTest, VerifyLatentTreeSkipsMcForNonBinary) {
  const auto r = run({"verify", "--model", kData + "/latent_tree.json"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mc skipped"), std::string::npos);
}

TEST_F(CliTest, VerifyCorruptedDiagramExitsFive) {
  const auto r = run({"verify", "--model", kData + "/admissions.json", "--odd", kData + "/admissions_corrupt.odd"});
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.out.find("mismatch"), std::string::npos);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"explain", "--odd", kData + "/admissions.odd", "--kind", "xx", "--instance", "+"}).code, 2);
  EXPECT_EQ(run({"explain", "--odd", kData + "/admissions.odd", "--kind", "mc", "--instance", "+ + + +",
                 "--histogram"}).code,
            2);
  EXPECT_EQ(run({"explain", "--odd", kData + "/admissions.odd", "--kind", "mc", "--instance", "+ + ?"}).code, 3);
  EXPECT_EQ(run({"explain", "--odd", kData + "/admissions.json", "--kind", "mc", "--instance", "+"}).code, 3);
  EXPECT_EQ(run({"compile", "--model", kData + "/admissions.odd", "--out", path("x")}).code, 3);
  EXPECT_EQ(run({"compile", "--model", kData + "/latent_tree.json", "--order", "X1", "--out", path("x")}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, CapacityExitFour) {
  ::setenv("BNX_BRUTE_FORCE_CAP", "100", 1);
  const auto r = run({"verify", "--model", kData + "/random16.json"});
  ::unsetenv("BNX_BRUTE_FORCE_CAP");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("capacity"), std::string::npos);
}

TEST_F(CliTest, DiagnosticsGoToErrorStream) {
  const auto r = run({"explain", "--odd", path("missing.odd"), "--kind", "mc", "--instance", "+"});
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
}

}  // namespace
}  // namespace bnx
