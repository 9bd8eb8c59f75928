#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "latgf/oracles.hpp"
#include "json.hpp"

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LATGF_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int st = pclose(pipe);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string run_stderr(const std::string& args) {
  const std::string cmd = std::string(LATGF_CLI_PATH) + " " + args + " 2>&1 >/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  pclose(pipe);
  return out;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, ConstantsThreeDimensions) {
  auto r = run("constants --dim 3");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("a_d,0.0795774715459"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("n_d,2"), std::string::npos);
  EXPECT_NE(r.out.find("h0,6"), std::string::npos);
}

TEST(Cli, ConstantsFourDimensions) {
  auto r = run("constants --dim 4");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("n_d,3"), std::string::npos) << r.out;
}

TEST(Cli, DimensionTwoIsRejected) {
  EXPECT_EQ(run("constants --dim 2").status, 1);
  EXPECT_EQ(run("green --dim 2 --x 1,0").status, 1);
}

TEST(Cli, GreenEmptyPointListGivesHeaderOnly) {
  auto r = run("green --dim 3 --grid-n 32");
  EXPECT_EQ(r.status, 0);
  ASSERT_EQ(r.out.rfind("# latgf green schema_version=1", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("x,i1,i2,total,error_estimate,method\n"), std::string::npos);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
}

TEST(Cli, AliasingIsReported) {
  auto r = run("green --dim 3 --grid-n 32 --max-grid-n 32 --x 40,0,0");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(run_stderr("green --dim 3 --grid-n 32 --max-grid-n 32 --x 40,0,0").find("alias"), std::string::npos);
}

TEST(Cli, GreenMatchesSeries) {
  auto r = run("green --dim 3 --grid-n 64 --x 1,0,0 --format json");
  ASSERT_EQ(r.status, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 1u);
  const double total = j["rows"][0]["total"];
  auto s = latgf::green_series_oracle(latgf::simple_random_walk(3), latgf::LatticePoint{1, 0, 0}, 400);
  EXPECT_NEAR(total, s.value, 1e-4);
}

TEST(Cli, SchemaErrorNamesField) {
  auto path = write_temp("bad_model.json", R"({"dim": 3, "orbits": [{"point": [1, 0, 0], "weight": "x"}]})");
  EXPECT_EQ(run("constants --dim 3 --model " + path).status, 1);
  EXPECT_NE(run_stderr("constants --dim 3 --model " + path).find("orbits[0].weight"), std::string::npos);
}

TEST(Cli, OracleIsDeterministic) {
  const std::string args = "oracle --dim 3 --x 1,0,0 --n-max 400 --walks 2000 --seed 11";
  auto a = run(args), b = run(args);
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("x,series,tail_estimate,partial_sum,mc_mean,mc_stderr,mc_step_cap"), std::string::npos);
}

TEST(Cli, AsymptoteJson) {
  auto r = run("asymptote --dim 3 --grid-n 64 --L-min 10 --L-max 20 --L-step 5 --format json");
  ASSERT_EQ(r.status, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_GT(j["norm_f"].get<double>(), 0.0);
}

TEST(Cli, ExampleModelFile) {
  const std::string path = std::string(LATGF_EXAMPLES_DIR) + "/lazy_walk_d3.json";
  auto r = run("constants --dim 3 --model " + path);
  EXPECT_EQ(r.status, 0);
  // sigma^2 = 1/2, so h(0) = 2d / sigma^2 = 12.
  EXPECT_NE(r.out.find("h0,12"), std::string::npos) << r.out;
  EXPECT_EQ(run("constants --dim 4 --model " + path).status, 1);
}
