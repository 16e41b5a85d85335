#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(BERIC_CLI) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string model(const char* name) { return std::string(BERIC_MODELS) + "/" + name; }

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("check --model eds:n=3"), 0);
  EXPECT_EQ(run("check --model " + model("eds3.yaml")), 0);
  EXPECT_EQ(run("check --model " + model("sphere.yaml")), 1);
  EXPECT_EQ(run("check --model " + model("missing.yaml")), 2);
  EXPECT_EQ(run("check --model eds:n=3 --m 0"), 2);
  EXPECT_EQ(run("check"), 2);
  EXPECT_EQ(run("check --model " + model("singular.yaml")), 3);
  EXPECT_EQ(run("variation --model " + model("open_variation.yaml")), 4);
  EXPECT_EQ(run("variation --model " + model("flat_critical.yaml")), 0);
  EXPECT_EQ(run("variation --model random-torus:n=2 --seed 3"), 0);
  EXPECT_EQ(run("curvature --model " + model("sphere.yaml") + " --m inf"), 0);
}

TEST(Cli, ReportsAreByteIdentical) {
  for (const char* args : {"check --model eds:n=2 --m 2", "variation --model random-torus:n=2 --seed 4 --grid 24,24"}) {
    ASSERT_EQ(run(std::string(args) + " --output cli_a.json"), 0);
    ASSERT_EQ(run(std::string(args) + " --output cli_b.json"), 0);
    std::string a = slurp("cli_a.json");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp("cli_b.json")) << args;
  }
}

TEST(Cli, MergeKeepsWorstAggregates) {
  ASSERT_EQ(run("check --model eds:n=3 --output cli_m1.json"), 0);
  ASSERT_EQ(run("check --model " + model("sphere.yaml") + " --output cli_m2.json"), 1);
  EXPECT_EQ(run("report-merge cli_m1.json cli_m2.json --output cli_m12.json"), 1);
  EXPECT_EQ(run("report-merge cli_m2.json cli_m1.json --output cli_m21.json"), 1);
  EXPECT_EQ(run("report-merge cli_m1.json --output cli_m11.json"), 0);
}
