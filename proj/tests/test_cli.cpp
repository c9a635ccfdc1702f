#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "semlab/cli.hpp"
#include "test_support.hpp"

namespace semlab {
namespace {

using testing::device_path;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, NoArgumentsIsUsageError) {
  const auto r = run({});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UnknownFlagIsUsageError) {
  const auto r = run({"verify", "--degree", "3", "--bogus"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, HelpGoesToOutput) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}

TEST(Cli, Verify) {
  const auto r = run({"verify", "--degree", "3", "--elements", "8", "--seed", "42"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("max_rel_error="), std::string::npos);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);

  const auto j = run({"verify", "--degree", "2", "--elements", "2", "--fields", "5",
                      "--format", "json"});
  ASSERT_EQ(j.code, kExitOk) << j.err;
  const auto doc = nlohmann::json::parse(j.out);
  EXPECT_TRUE(doc.at("pass").get<bool>());
  EXPECT_EQ(doc.at("fields"), 5);

  EXPECT_EQ(run({"verify", "--degree", "9"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "--degree", "3", "--deform", "0.5"}).code, kExitUsage);
}

TEST(Cli, ModelJsonHasTmax) {
  const auto r = run({"model", "--device", device_path("stratix10.toml"), "--degrees", "7",
                      "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("\"t_max\": 4"), std::string::npos);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("reports").size(), 1u);
  EXPECT_EQ(doc.at("reports")[0].at("bound"), "bandwidth");
}

TEST(Cli, ModelTableAndCsv) {
  const auto t = run({"model", "--device", device_path("agilex027.toml"), "--degrees", "7,11,15"});
  EXPECT_EQ(t.code, kExitOk) << t.err;
  EXPECT_NE(t.out.find("266.4"), std::string::npos);
  const auto c = run({"model", "--device", device_path("agilex027.toml"), "--degrees", "1..3",
                      "--format", "csv"});
  EXPECT_EQ(c.code, kExitOk);
  EXPECT_EQ(std::count(c.out.begin(), c.out.end(), '\n'), 4);
}

TEST(Cli, ModelInfeasibleExit) {
  const auto dir = std::filesystem::temp_directory_path() / "semlab_cli_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "tiny.toml";
  std::ofstream(file) << "name = \"tiny\"\nfreq_mhz = 300\nbandwidth_gbs = 10\n";
  const auto r = run({"model", "--device", file.string(), "--degrees", "7", "--format", "json"});
  EXPECT_EQ(r.code, kExitInfeasible);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_FALSE(doc.at("reports")[0].at("feasible").get<bool>());
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, ModelBadDeviceFile) {
  EXPECT_EQ(run({"model", "--device", "/nonexistent.toml"}).code, kExitUsage);
  EXPECT_EQ(run({"model"}).code, kExitUsage);
  EXPECT_EQ(run({"model", "--device", device_path("stratix10.toml"), "--format", "xml"}).code,
            kExitUsage);
}

TEST(Cli, Roofline) {
  const auto r = run({"roofline", "--device", device_path("stratix10.toml"), "--degrees", "7"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("degree,intensity,roofline_gflops"), std::string::npos);
  const auto last_comma = r.out.rfind(',');
  EXPECT_NEAR(std::stod(r.out.substr(last_comma + 1)), 133.2, 1e-12);
  const auto j = run({"roofline", "--device", device_path("a100_pcie.toml"), "--format", "json"});
  EXPECT_EQ(nlohmann::json::parse(j.out).at("rows").size(), 15u);
}

TEST(Cli, BasisDump) {
  const auto r = run({"basis-dump", "--degree", "2"});
  ASSERT_EQ(r.code, kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc.at("weights")[1].get<double>(), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(doc.at("deriv").size(), 3u);
  EXPECT_EQ(run({"basis-dump", "--degree", "0"}).code, kExitUsage);
}

TEST(Cli, Solve) {
  const auto r = run({"solve", "--degree", "4", "--elements", "2,2,2", "--tol", "1e-10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("iterations "), std::string::npos);
  EXPECT_NE(r.out.find("max_nodal_error "), std::string::npos);
  EXPECT_NE(r.out.find("ax_gflops"), std::string::npos);

  const auto capped = run({"solve", "--degree", "4", "--max-iters", "2"});
  EXPECT_EQ(capped.code, kExitVerificationFailed);
  const auto j = run({"solve", "--degree", "2", "--kernel", "ref", "--format", "json"});
  EXPECT_TRUE(nlohmann::json::parse(j.out).at("converged").get<bool>());
}

TEST(Cli, BenchAndPlotdata) {
  const auto b = run({"bench", "--kernel", "unroll2", "--degrees", "3", "--elements", "1..8:x8",
                      "--reps", "3"});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 3);

  const auto dir = std::filesystem::temp_directory_path() / "semlab_cli_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "bench.csv";
  std::ofstream(file) << b.out;
  const auto p = run({"plotdata", "--input", file.string(), "--bar-elements", "8", "--format",
                      "json"});
  ASSERT_EQ(p.code, kExitOk) << p.err;
  const auto doc = nlohmann::json::parse(p.out);
  EXPECT_EQ(doc.at("bars").size(), 1u);

  const auto j = run({"bench", "--degrees", "2", "--elements", "1", "--reps", "3", "--format",
                      "json"});
  EXPECT_EQ(nlohmann::json::parse(j.out).at("records").size(), 1u);

  EXPECT_EQ(run({"bench", "--reps", "2"}).code, kExitUsage);
  EXPECT_EQ(run({"bench", "--elements", "0", "--reps", "3"}).code, kExitUsage);
  // unroll4 is illegal at N = 4: reported, sweep continues, exit 1
  const auto partial = run({"bench", "--kernel", "unroll4", "--degrees", "3,4", "--elements", "1",
                            "--reps", "3"});
  EXPECT_EQ(partial.code, kExitVerificationFailed);
  EXPECT_EQ(std::count(partial.out.begin(), partial.out.end(), '\n'), 2);
}

}  // namespace
}  // namespace semlab
