#include <gtest/gtest.h>
#include <sys/wait.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef QDYB_CLI
#error "QDYB_CLI must name the qdyb binary"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  Run r;
  std::string cmd = std::string(QDYB_CLI) + " " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), got);
  int status = pclose(f);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_file(const std::string& name, const std::string& body) {
  auto path = std::filesystem::temp_directory_path() / ("qdyb_cli_" + name);
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST(Cli, VerifyPassesAndIsDeterministic) {
  auto a = run("verify qdybe --n 2 --seed 7 --no-timing");
  auto b = run("verify qdybe --n 2 --seed 7 --no-timing");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["status"], "pass");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_FALSE(j["records"].empty());
}

TEST(Cli, SeedChangesTheDraws) {
  auto a = run("build --n 2 --seed 1");
  auto b = run("build --n 2 --seed 2");
  EXPECT_EQ(a.code, 0);
  EXPECT_NE(a.out, b.out);
}

TEST(Cli, CorruptionFailsWithWitness) {
  auto r = run("verify qdybe --n 2 --corrupt broken-beta --no-timing");
  EXPECT_EQ(r.code, 1);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "fail");
  bool witnessed = false;
  for (const auto& e : j["records"]) witnessed = witnessed || (e["status"] == "fail" && e.contains("witness"));
  EXPECT_TRUE(witnessed);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("verify qdybe --corrupt wrong-eps-sign").code, 2);
  EXPECT_EQ(run("verify nosuch").code, 2);
  EXPECT_EQ(run("build --n 2 --q 1/0").code, 2);
  EXPECT_EQ(run("--bogus").code, 2);
}

TEST(Cli, DynamicalPoleExitsTwo) {
  // f(1, -1/2) vanishes at q = 2
  EXPECT_EQ(run("build --n 2 --q 2 --beta -1/2 --p p12=1").code, 2);
  EXPECT_EQ(run("build --n 2 --q 2 --beta 1 --p p12=2").code, 0);
}

TEST(Cli, BuildMatchesOracleEntry) {
  auto r = run("build --n 2 --q 2 --beta 1 --p p12=2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("16/11"), std::string::npos);
  EXPECT_NE(r.out.find("43/22"), std::string::npos);
}

TEST(Cli, WznwReport) {
  auto r = run("wznw --n 2 --q 9/4 --root 3/2 --p p12=1");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["casimir"], "0");
  EXPECT_EQ(j["d"][0], "-3/2");
}

TEST(Cli, DeriveScripts) {
  EXPECT_EQ(run("derive " + temp_file("empty.json", "[]")).code, 0);
  auto bad = temp_file("bad.json", R"([{"id": "bad", "start": [{"a": ["i", "x"]}],
    "moves": [{"move": "EpsCollapseRight", "at": 1}], "end": [{"a": ["i", "x"]}]}])");
  auto r = run("derive " + bad + " --no-oracle --no-timing");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("moves step 1 (EpsCollapseRight)"), std::string::npos) << r.out;
}

TEST(Cli, ConfigFileMergesWithFlags) {
  auto cfg = temp_file("cfg.json", R"({"n": 3, "seed": 5, "draws": 1})");
  auto r = run("dump config --config " + cfg + " --seed 9");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n"], 3);
  EXPECT_EQ(j["seed"], 9);
}
