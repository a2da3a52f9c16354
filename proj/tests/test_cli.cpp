// Drives the built command-line tool through std::system.

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path &p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("haprtr_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string &name) const { return dir_ / name; }

  Result run(const std::string &args) const {
    const std::string cmd = std::string(HAPRTR_CLI_PATH) + " " + args + " >" +
                            path("stdout").string() + " 2>" +
                            path("stderr").string();
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(path("stdout")), slurp(path("stderr"))};
  }

  void write(const std::string &name, const std::string &text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("generate --m 5").code, 1);
  EXPECT_EQ(run("generate --m 5 --n 4 --pd 2 --out " + path("a.hap").string()).code,
            1);
  EXPECT_FALSE(fs::exists(path("a.hap")));
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run("--help").code, 0); }

TEST_F(Cli, GenerateIsByteIdenticalPerSeed) {
  ASSERT_EQ(run("generate --m 12 --n 9 --pd 0.6 --err 0.1 --seed 4 --out " +
                path("a.hap").string())
                .code,
            0);
  ASSERT_EQ(run("generate --m 12 --n 9 --pd 0.6 --err 0.1 --seed 4 --out " +
                path("b.hap").string())
                .code,
            0);
  const std::string a = slurp(path("a.hap"));
  EXPECT_EQ(a, slurp(path("b.hap")));
  EXPECT_EQ(a.rfind("HAP1 12 9\n", 0), 0u);
  EXPECT_NE(a.find("TRUTH "), std::string::npos);
}

TEST_F(Cli, SolveReportsHammingDistanceWhenTruthKnown) {
  ASSERT_EQ(run("generate --m 20 --n 10 --pd 1 --err 0 --seed 2 --out " +
                path("a.hap").string())
                .code,
            0);
  for (const char *method : {"rtr", "altmin"}) {
    const Result r = run("solve " + path("a.hap").string() + " --method " + method);
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("method: " + std::string(method)), std::string::npos);
    EXPECT_NE(r.out.find("hd: 0\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("mec: 0\n"), std::string::npos);
  }
}

TEST_F(Cli, SolveWithoutTruthPrintsNotAvailable) {
  write("plain.hap", "HAP1 3 3\n++-\n--+\n+x-\n");
  const Result r = run("solve " + path("plain.hap").string() + " --seed 1");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("hd: n/a\n"), std::string::npos);
}

TEST_F(Cli, UnknownMethodListsRegistered) {
  write("plain.hap", "HAP1 2 2\n++\n--\n");
  const Result r = run("solve " + path("plain.hap").string() + " --method sdp");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("altmin, rtr"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingOrMalformedFilesExitTwo) {
  EXPECT_EQ(run("solve " + path("none.hap").string()).code, 2);
  write("bad.hap", "HAP1 2 2\n++\n+\n");
  const Result r = run("solve " + path("bad.hap").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(Cli, BadConfigKeyExitsOne) {
  write("a.cfg", "nonsense = 1\n");
  const Result r = run("experiment --config " + path("a.cfg").string() +
                    " --out " + path("o.csv").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nonsense"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("o.csv")));
}

TEST_F(Cli, ExperimentThenPlot) {
  write("a.cfg",
        "m = 15\nn = 8\npd_grid = 0.5, 0.8\nerr_grid = 0.1\ntrials = 2\n");
  ASSERT_EQ(run("experiment --config " + path("a.cfg").string() + " --out " +
                path("o.csv").string())
                .code,
            0);
  ASSERT_EQ(run("experiment --config " + path("a.cfg").string() +
                " --threads 2 --out " + path("p.csv").string())
                .code,
            0);
  const std::string csv = slurp(path("o.csv"));
  EXPECT_EQ(csv, slurp(path("p.csv")));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 2 * 2);

  ASSERT_EQ(run("plot " + path("o.csv").string() + " --out " +
                path("o.svg").string())
                .code,
            0);
  EXPECT_NE(slurp(path("o.svg")).find("<path class=\"series\""),
            std::string::npos);
}

TEST_F(Cli, PlotOfEmptyCsvFails) {
  write("empty.csv",
        "pd,err,trial,seed,method,hd,mec,unrecoverable_sites,iterations,"
        "grad_norm,wall_time_ms\n");
  const Result r = run("plot " + path("empty.csv").string() + " --out " +
                    path("e.svg").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(fs::exists(path("e.svg")));
}

TEST_F(Cli, ThreadEnvironmentVariableGivesSameOutput) {
  write("a.cfg", "m = 12\nn = 6\npd_grid = 0.6\ntrials = 3\n");
  ASSERT_EQ(run("experiment --config " + path("a.cfg").string() + " --out " +
                path("a.csv").string())
                .code,
            0);
  const std::string cmd_prefix = "HAPRTR_THREADS=2 ";
  const std::string cmd = cmd_prefix + HAPRTR_CLI_PATH + " experiment --config " +
                          path("a.cfg").string() + " --out " +
                          path("b.csv").string() + " >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}
