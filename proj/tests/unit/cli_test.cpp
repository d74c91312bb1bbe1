#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

#ifndef QMCFORGE_CLI_PATH
#error "QMCFORGE_CLI_PATH must name the CLI binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QMCFORGE_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  Run r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qmcforge_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  json read(const std::string& name) const {
    std::ifstream in(path(name));
    return json::parse(in);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ConstructLattice) {
  const auto r = run("construct --kind lattice --N 31 --s 4 --alpha 1 --weights product:j^-2 --out " + path("r.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = read("r.json");
  EXPECT_EQ(j.at("z")[0], 1);
  EXPECT_EQ(j.at("z").size(), 4u);
  EXPECT_NE(r.out.find("step,choice,merit"), std::string::npos);
}

TEST_F(Cli, ConstructPolyDefaultModulus) {
  ASSERT_EQ(run("construct --kind poly-lattice --b 2 --m 5 --s 3 --alpha 1 --out " + path("p.json")).code, 0);
  EXPECT_EQ(read("p.json").at("p"), json({1, 0, 1, 0, 0, 1}));
}

TEST_F(Cli, FastCompositeRejected) {
  EXPECT_EQ(run("construct --kind lattice --N 32 --s 2 --fast").code, 2);
}

TEST_F(Cli, RoundTripMatchesTrace) {
  ASSERT_EQ(run("construct --N 61 --s 3 --alpha 2 --weights product:j^-2 --out " + path("r.json")).code, 0);
  const double traced = read("r.json").at("trace").back().at("merit").get<double>();
  const auto r = run("evaluate " + path("r.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out).at("P").get<double>(), traced, 1e-12 * traced);
}

TEST_F(Cli, EvaluateChangedSpace) {
  ASSERT_EQ(run("construct --N 31 --s 2 --alpha 1 --out " + path("r.json")).code, 0);
  const auto a = json::parse(run("evaluate " + path("r.json")).out);
  const auto b = json::parse(run("evaluate " + path("r.json") + " --alpha 2 --weights product:j^-4").out);
  EXPECT_LT(b.at("P").get<double>(), a.at("P").get<double>());
}

TEST_F(Cli, EvaluateRhoPerSubset) {
  ASSERT_EQ(run("construct --N 13 --s 2 --out " + path("r.json")).code, 0);
  const auto j = json::parse(run("evaluate " + path("r.json") + " --rho").out);
  EXPECT_TRUE(j.contains("rho"));
  ASSERT_EQ(j.at("per_subset").size(), 3u);
  EXPECT_TRUE(j.at("per_subset")[0].contains("phi"));
}

TEST_F(Cli, EvaluateDiscrepancyCsv) {
  ASSERT_EQ(run("construct --N 13 --s 2 --out " + path("r.json")).code, 0);
  const auto r = run("evaluate " + path("r.json") + " --discrepancy --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("exact_dstar"), std::string::npos);
}

TEST_F(Cli, EvaluateMissingFile) { EXPECT_EQ(run("evaluate " + path("none.json")).code, 2); }

TEST_F(Cli, CertifyStability) {
  std::ofstream(path("five.json")) << R"({"type":"lattice","N":5,"z":[1]})";
  const auto r = run("certify thm1 " + path("five.json") + " --alpha 1 --weights constant:1");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.at("passed").get<bool>());
  EXPECT_NEAR(j.at("margin").get<double>(), 0.83, 0.01);
}

TEST_F(Cli, CertifyJensen) {
  ASSERT_EQ(run("construct --N 31 --s 2 --out " + path("r.json")).code, 0);
  EXPECT_EQ(run("certify jensen " + path("r.json") + " --delta 0.5").code, 0);
}

TEST_F(Cli, CertifyNonMonotone) {
  ASSERT_EQ(run("construct --N 31 --s 2 --out " + path("r.json")).code, 0);
  EXPECT_EQ(run("certify thm1 " + path("r.json") + " --weights 'pod:Gamma=1,3;gamma=1,1'").code, 2);
}

TEST_F(Cli, CertifyCsv) {
  ASSERT_EQ(run("construct --N 31 --s 2 --out " + path("r.json")).code, 0);
  const auto r = run("certify prop1 " + path("r.json") + " --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "s,N_or_m,lhs,rhs,margin,passed");
}

TEST_F(Cli, SweepSlope) {
  const auto r = run("sweep --grid primes:17..251 --s 2 --alpha 1 --weights product:j^-2 --certify thm1");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line, last;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("# slope_sqrtP,", 0) == 0) last = line;
    if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) {
      ++rows;
      EXPECT_EQ(line.substr(line.rfind(',') + 1), "true");
    }
  }
  EXPECT_EQ(rows, 48);
  ASSERT_FALSE(last.empty());
  const double slope = std::stod(last.substr(last.find(',') + 1));
  EXPECT_LT(slope, -0.85);
  EXPECT_GT(slope, -1.2);
}

TEST_F(Cli, SweepEmptyGrid) { EXPECT_EQ(run("sweep --grid primes:24..28").code, 2); }

TEST_F(Cli, SweepPoly) {
  const auto r = run("sweep --kind poly-lattice --grid 3..6 --s 2 --certify thm2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("thm2_rhs"), std::string::npos);
}

TEST_F(Cli, ConfigFile) {
  std::ofstream(path("cfg.json")) << R"({"command":"construct","kind":"lattice","N":17,"s":3,"weights":"product:j^-2"})";
  ASSERT_EQ(run("--config " + path("cfg.json") + " --out " + path("r.json")).code, 0);
  EXPECT_EQ(read("r.json").at("N"), 17);
  ASSERT_EQ(run("construct --config " + path("cfg.json") + " --N 19 --out " + path("r2.json")).code, 0);
  EXPECT_EQ(read("r2.json").at("N"), 19);
}

TEST_F(Cli, UnknownFlag) { EXPECT_EQ(run("construct --bogus 3").code, 2); }

TEST_F(Cli, ResourceLimit) {
  EXPECT_EQ(run("construct --kind poly-lattice --b 2 --m 21 --s 1").code, 3);
}
