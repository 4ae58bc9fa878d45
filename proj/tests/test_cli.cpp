#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(PARARELAX_CLI) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("pararelax_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

const char* kSinToy = R"({
  "variables": [{"name": "x", "lb": 0, "ub": "2pi"}, {"name": "y", "lb": -2, "ub": 2}],
  "objective": {"coeffs": {"y": 1}},
  "constraints": [{"expr": "sin(x) <= y"}]
})";

const char* kLinearToy = R"({
  "variables": [{"name": "a", "lb": 0, "ub": 3}, {"name": "b", "lb": -1, "ub": 1}],
  "objective": {"coeffs": {"a": 1, "b": 2}},
  "constraints": [{"expr": "a + b >= 1", "name": "lin"}]
})";

}  // namespace

TEST_F(Cli, ApproxParaSinOnePiece) {
  const Outcome r = run("approx para --fn sin --domain 0:pi --eps 1 -o " + path("a.json"));
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(slurp(path("a.json")));
  EXPECT_EQ(j.at("technique"), "para");
  EXPECT_EQ(j.at("approximation").at("pieces").size(), 1u);
  EXPECT_EQ(j.at("verification").at("status"), "PASS");
}

TEST_F(Cli, ApproxPwlLn) {
  const Outcome r = run("approx pwl --fn ln --domain e^-4:e^2 --eps 0.1");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("approximation").at("breakpoints").size(), 11u);
  EXPECT_EQ(j.at("verification").at("status"), "PASS");
}

TEST_F(Cli, ApproxZeroFunction) {
  const Outcome r = run("approx para --fn const0 --eps 0.5");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out).at("approximation").at("pieces").size(), 1u);
}

TEST_F(Cli, ApproxIsDeterministic) {
  ASSERT_EQ(run("approx para --fn exp --domain -2:2 --eps 0.01 --side above -o " + path("1.json")).code, 0);
  ASSERT_EQ(run("approx para --fn exp --domain -2:2 --eps 0.01 --side above -o " + path("2.json")).code, 0);
  EXPECT_EQ(slurp(path("1.json")), slurp(path("2.json")));
}

TEST_F(Cli, CountTableCell) {
  const Outcome r = run("count-table --fn sin --eps 0.01 --samples 20000");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.rfind("sin,-pi/2:3pi/2,", 0) == 0 && line.find(",above,") != std::string::npos) {
      EXPECT_NE(line.find(",14,PASS,"), std::string::npos) << line;
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST_F(Cli, RelaxBothTechniquesWithCheck) {
  write("toy.json", kSinToy);
  for (const char* technique : {"para", "pwl"}) {
    const Outcome r = run(std::string("relax --problem ") + path("toy.json") + " --technique " + technique +
                      " --eps 0.1 --check --grid 2000 -o " + path("m.lp") + " --json " + path("m.json"));
    EXPECT_EQ(r.code, 0) << technique;
    const std::string lp = slurp(path("m.lp"));
    EXPECT_NE(lp.find("SUBJECT TO"), std::string::npos);
    EXPECT_NE(lp.find("BOUNDS"), std::string::npos);
    EXPECT_EQ(json::parse(slurp(path("m.json"))).at("technique"), technique);
  }
}

TEST_F(Cli, RelaxLinearProblemUnchanged) {
  write("lin.json", kLinearToy);
  const Outcome r = run("relax --problem " + path("lin.json") + " --eps 0.1 --json " + path("m.json"));
  ASSERT_EQ(r.code, 0);
  const json m = json::parse(slurp(path("m.json")));
  EXPECT_EQ(m.at("variables").size(), 2u);
  EXPECT_EQ(m.at("rows").size(), 1u);
}

TEST_F(Cli, PlotData) {
  ASSERT_EQ(run("approx para --fn sin --domain 0:pi --eps 0.1 -o " + path("a.json")).code, 0);
  ASSERT_EQ(run("plot-data --in " + path("a.json") + " --samples 200 -o " + path("p.csv") + " --svg " +
                path("p.svg")).code, 0);
  std::istringstream in(slurp(path("p.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,f,envelope,p1");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<double> cols;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(std::stod(cell));
    ASSERT_EQ(cols.size(), 4u);
    EXPECT_EQ(cols[2], *std::max_element(cols.begin() + 3, cols.end()));
  }
  EXPECT_EQ(rows, 201u);
  EXPECT_NE(slurp(path("p.svg")).find("<polyline"), std::string::npos);
}

TEST_F(Cli, VerifyDetectsTampering) {
  ASSERT_EQ(run("approx para --fn cos --domain 0:2pi --eps 0.1 -o " + path("a.json")).code, 0);
  EXPECT_EQ(run("verify --in " + path("a.json")).code, 0);
  json j = json::parse(slurp(path("a.json")));
  j["approximation"]["pieces"][0]["c"] = j["approximation"]["pieces"][0]["c"].get<double>() + 0.2;
  write("bad.json", j.dump());
  EXPECT_EQ(run("verify --in " + path("bad.json")).code, 2);
}

TEST_F(Cli, LookupTable) {
  const std::string cache = path("lut.jsonl");
  const Outcome first = run("lut --fn exp --domain -0.456:1.234 --eps 0.1 --cache " + cache);
  ASSERT_EQ(first.code, 0);
  const Outcome second = run("lut --fn exp --domain -0.41:1.236 --eps 0.1 --cache " + cache);
  ASSERT_EQ(second.code, 0);
  EXPECT_EQ(first.out, second.out);
  const Outcome rounded = run("lut --fn exp --domain -132:1 --round-only");
  ASSERT_EQ(rounded.code, 0);
  EXPECT_NE(rounded.out.find("-200"), std::string::npos) << rounded.out;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("approx para --fn sin --domain 3:1 --eps 1").code, 4);
  EXPECT_EQ(run("approx para --fn sin --domain 0:pi").code, 4);
  EXPECT_EQ(run("approx para --fn tan --domain 0:1 --eps 1").code, 4);
  EXPECT_EQ(run("approx para --fn ln --domain -1:2 --eps 0.1").code, 3);
  write("bad.json", R"({"variables": [{"name": "x", "lb": 0, "ub": 1}], "objective": "x",
                        "constraints": [{"expr": "sin(x +"}]})");
  EXPECT_EQ(run("relax --problem " + path("bad.json") + " --eps 0.1").code, 4);
  write("abs.json", R"({"variables": [{"name": "x", "lb": -1, "ub": 1}], "objective": "x",
                        "constraints": [{"expr": "abs(x) <= 0.5"}]})");
  EXPECT_EQ(run("relax --problem " + path("abs.json") + " --eps 0.1").code, 4);
}
