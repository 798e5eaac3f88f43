#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cli_harness.hpp"
#include "json.hpp"

using harness::parse_csv;
using harness::run;

TEST(Cli, DerhamEvalGrid) {
  const auto r = run({"derham-eval", "--a", "0.25", "--grid", "256", "--depth", "24", "--format", "csv"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.header, (std::vector<std::string>{"x", "value"}));
  ASSERT_EQ(csv.rows.size(), 257u);
  EXPECT_EQ(csv.rows[128][0], 0.5);
  EXPECT_NEAR(csv.rows[128][1], 0.25, 1e-10);
}

TEST(Cli, DerhamVelocityTable) {
  const auto r = run({"derham-velocity", "--a", "0.25", "--depth", "4"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 15u);
  std::set<double> seen;
  for (const auto& row : csv.rows) {
    EXPECT_EQ(row[2], std::pow(3.0, row[1] - 1.0));
    seen.insert(row[2]);
  }
  EXPECT_EQ(seen, (std::set<double>{1, 3, 9, 27}));
}

TEST(Cli, TheoremCheckJson) {
  const auto r = run({"theorem-check", "--f", "poly:1,0", "--a0", "0", "--x", "0.5", "--alpha", "0.3", "--beta",
                      "0.6", "--eps", "0.05", "--nodes", "2048", "--format", "json"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["subcommand"], "theorem-check");
  EXPECT_EQ(j["parameters"]["nodes"], 2048);
  EXPECT_EQ(j["parameters"]["f"], "poly:1,0");
  EXPECT_LT(j["results"][0]["residual"].get<double>(), 1e-3);
  EXPECT_TRUE(j["diagnostics"].empty());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"no-such-thing"}).status, 64);
  EXPECT_EQ(run({}).status, 64);
  EXPECT_EQ(run({"rl-integral", "--beta", "zero"}).status, 64);
  EXPECT_EQ(run({"rl-integral", "--bogus", "1"}).status, 64);
  EXPECT_EQ(run({"rl-integral", "--format", "xml"}).status, 64);
  const auto dom = run({"rl-integral", "--a0", "2", "--x", "1"});
  EXPECT_EQ(dom.status, 1);
  EXPECT_FALSE(dom.err.empty());
  EXPECT_EQ(run({"derham-velocity", "--a", "0.5"}).status, 1);
  EXPECT_EQ(run({"scale-sequence", "--factors", "2,0.5"}).status, 1);
  const auto nc = run({"velocity", "--f", "abs-pow:0.3@0", "--beta", "0.6"});
  EXPECT_EQ(nc.status, 2);
  EXPECT_NE(nc.err.find("diverging"), std::string::npos);
  EXPECT_EQ(run({"velocity", "--f", "pow:0.5", "--beta", "0.5"}).status, 0);
}

TEST(Cli, HelpListsEveryFlagWithDefaults) {
  for (const auto& cmd : fracvel::cli::subcommands()) {
    const auto r = run({cmd.name, "--help"});
    EXPECT_EQ(r.status, 0) << cmd.name;
    for (const auto& f : cmd.flags) {
      EXPECT_NE(r.out.find("--" + f.name), std::string::npos) << cmd.name << " --" << f.name;
      EXPECT_NE(r.out.find(f.default_value), std::string::npos) << cmd.name << " --" << f.name;
    }
    for (const char* common : {"--format", "--seed", "--output"})
      EXPECT_NE(r.out.find(common), std::string::npos) << cmd.name;
  }
  EXPECT_EQ(run({"--help"}).status, 0);
}

TEST(Cli, ReproducibleFileOutput) {
  const std::string a = testing::TempDir() + "mc_a.csv";
  const std::string b = testing::TempDir() + "mc_b.csv";
  for (const auto& path : {a, b})
    ASSERT_EQ(run({"mc-derham", "--x", "0.3", "--trials", "2000", "--seed", "7", "--output", path}).status, 0);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
  const auto other = run({"mc-derham", "--x", "0.3", "--trials", "2000", "--seed", "8"});
  EXPECT_NE(other.out, slurp(a));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(Cli, CsvRoundTripsDoubles) {
  const auto r = run({"rl-integral", "--f", "sin", "--beta", "0.37", "--x", "0.9", "--nodes", "333"});
  ASSERT_EQ(r.status, 0);
  const double v = parse_csv(r.out).rows.at(0).at(1);
  EXPECT_EQ(v, fracvel::rl_integral(fracvel::sine_signal(), 0.37, {0, 0.9, 333}));
}

TEST(Cli, DnProfileRefines) {
  const auto k4 = parse_csv(run({"dn-profile", "--k", "4", "--grid-depth", "4"}).out);
  const auto k8 = parse_csv(run({"dn-profile", "--k", "8", "--grid-depth", "4"}).out);
  ASSERT_EQ(k4.rows.size(), 16u);
  EXPECT_EQ(k4.rows, k8.rows);
  const auto fine = parse_csv(run({"dn-profile", "--k", "8", "--grid-depth", "8"}).out);
  for (size_t i = 0; i < 16; ++i) EXPECT_EQ(fine.rows[16 * i], k4.rows[i]);
}

TEST(Cli, EverySubcommandRunsOnDefaults) {
  for (const auto& cmd : fracvel::cli::subcommands()) {
    const auto r = run({cmd.name});
    EXPECT_EQ(r.status, 0) << cmd.name << ": " << r.err;
    EXPECT_FALSE(r.out.empty()) << cmd.name;
  }
}
