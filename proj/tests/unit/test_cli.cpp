#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../../tools/cli.hpp"
#include "oee/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "oee");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return oee::cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "oee_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string strip_metadata(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line))
    if (!line.starts_with("#")) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("exit codes") {
  const auto dir = scratch();
  CHECK(run({}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"ensemble", "--variant", "case7"}) == 2);
  CHECK(run({"ensemble", "--variant", "case2", "--wo", "2", "--no-complexity"}) == 2);
  CHECK(run({"run", "--variant", "eca", "--rule-o", "300", "--out", (dir / "x.csv").string()}) == 2);
  CHECK(run({"--help"}) == 0);
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "not,a,records,file\n";
  }
  CHECK(run({"analyze", "--csv", (dir / "bad.csv").string(), "--out-dir", (dir / "bad_out").string()}) == 3);
  CHECK(run({"analyze", "--csv", (dir / "missing.csv").string()}) == 3);
  {
    std::ofstream bad(dir / "bad.conf");
    bad << "this line has no equals sign\n";
  }
  CHECK(run({"--config", (dir / "bad.conf").string(), "ensemble", "--variant", "eca"}) == 3);
}

TEST_CASE("run writes a trajectory") {
  const auto dir = scratch();
  const auto out = dir / "traj.csv";
  REQUIRE(run({"run", "--variant", "case1", "--state-o", "0110", "--rule-o", "30", "--state-e", "101100", "--rule-e", "110",
               "--out", out.string(), "--pgm", (dir / "traj.pgm").string()}) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("t,s_o,r_o,s_e\n0,0110,30,101100\n") != std::string::npos);
  CHECK(slurp(dir / "traj.pgm").starts_with("P5\n"));
}

TEST_CASE("ensemble, analyze and determinism across thread counts") {
  const auto dir = scratch();
  const auto base = std::vector<std::string>{"ensemble", "--variant", "case1", "--wo", "4", "--we", "4", "--samples", "300",
                                             "--seed", "5", "--norm-samples", "16", "--norm-steps", "256"};
  auto a = base, b = base;
  a.insert(a.begin(), {"--threads", "1"});
  a.insert(a.end(), {"--csv", (dir / "a.csv").string(), "--report", (dir / "a.json").string()});
  b.insert(b.begin(), {"--threads", "3"});
  b.insert(b.end(), {"--csv", (dir / "b.csv").string(), "--report", (dir / "b.json").string()});
  REQUIRE(run(a) == 0);
  REQUIRE(run(b) == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));

  ::setenv("OEE_THREADS", "2", 1);
  auto c = base;
  c.insert(c.end(), {"--csv", (dir / "c.csv").string(), "--report", (dir / "c.json").string()});
  REQUIRE(run(c) == 0);
  ::unsetenv("OEE_THREADS");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "c.csv"));

  const auto out = dir / "analysis";
  REQUIRE(run({"analyze", "--csv", (dir / "a.csv").string(), "--out-dir", out.string()}) == 0);
  CHECK(fs::exists(out / "report.json"));
  std::size_t svgs = 0;
  for (const auto& e : fs::directory_iterator(out)) svgs += e.path().extension() == ".svg";
  CHECK(svgs >= 5);
  // The rebuilt report matches the one written by the ensemble run.
  std::ifstream ra(dir / "a.json"), rb(out / "report.json");
  const auto ja = oee::Json::parse(ra), jb = oee::Json::parse(rb);
  CHECK(ja["oee_percent"] == jb["oee_percent"]);
  CHECK(ja["metagenome_all"] == jb["metagenome_all"]);
  CHECK(ja["complexity_all"] == jb["complexity_all"]);
}

TEST_CASE("config files supply defaults that flags override") {
  const auto dir = scratch();
  {
    std::ofstream conf(dir / "plan.conf");
    conf << "variant = case2\nwo = 3\nsamples = 40\nno-complexity = true\n";
  }
  REQUIRE(run({"--config", (dir / "plan.conf").string(), "ensemble", "--csv", (dir / "conf.csv").string(), "--report",
               (dir / "conf.json").string()}) == 0);
  REQUIRE(run({"--config", (dir / "plan.conf").string(), "ensemble", "--samples", "25", "--csv",
               (dir / "flag.csv").string(), "--report", (dir / "flag.json").string()}) == 0);
  auto count_rows = [](const std::string& csv) {
    std::size_t n = 0;
    for (char ch : strip_metadata(csv)) n += ch == '\n';
    return n - 1;
  };
  CHECK(count_rows(slurp(dir / "conf.csv")) == 40);
  CHECK(count_rows(slurp(dir / "flag.csv")) == 25);
}

TEST_CASE("render produces an image of the requested shape") {
  const auto dir = scratch();
  const auto out = dir / "render.pgm";
  REQUIRE(run({"render", "--out", out.string()}) == 0);
  const std::string pgm = slurp(out);
  REQUIRE(pgm.starts_with("P5\n"));
  CHECK(pgm.find("\n101 400\n255\n") != std::string::npos);
  CHECK(pgm.size() >= 101u * 400u);
  REQUIRE(run({"render", "--with-env", "--steps", "50", "--out", out.string()}) == 0);
  CHECK(slurp(out).find("\n203 50\n255\n") != std::string::npos);
}

TEST_CASE("oracle and norm subcommands") {
  const auto dir = scratch();
  CHECK(run({"oracle", "--width", "3", "--cache", (dir / "o3.bin").string()}) == 0);
  CHECK(run({"oracle", "--width", "3", "--cache", (dir / "o3.bin").string(), "--verify", "--check", "500"}) == 0);
  CHECK(run({"oracle", "--width", "6"}) == 2);
  CHECK(run({"norm", "--width", "5", "6", "--samples", "8", "--steps", "64", "--cache", (dir / "norm.txt").string()}) == 0);
  const std::string cache = slurp(dir / "norm.txt");
  CHECK(cache.find("5 8 64 1 ") != std::string::npos);
  CHECK(cache.find("6 8 64 1 ") != std::string::npos);
}
