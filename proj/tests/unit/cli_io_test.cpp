#include <sys/wait.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hydrolimit/errors.hpp"
#include "hydrolimit_io/csv.hpp"
#include "hydrolimit_io/pipelines.hpp"

using namespace hydrolimit;
using namespace hydrolimit::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("hydrolimit-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  std::string cmd = std::string(HYDROLIMIT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string text;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) text.append(buf, n);
  int status = pclose(pipe);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(CsvFormat, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t bits = rng();
    double x;
    std::memcpy(&x, &bits, sizeof x);
    if (!std::isfinite(x)) continue;
    std::string s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, x) << s;
  }
}

TEST(CsvFormat, WriterLayout) {
  auto dir = scratch_dir("csv");
  fs::create_directories(dir);
  {
    CsvWriter w(dir / "a.csv", {"a", "b", "c"}, {"note=1"});
    w.cell(0.5).cell(3LL).cell("x");
    w.end_row();
    w.row({1.0, 2.0, 3.0});
  }
  EXPECT_EQ(slurp(dir / "a.csv"), "# note=1\na,b,c\n0.5,3,x\n1,2,3\n");
}

TEST(Config, ValidationErrors) {
  RunConfig ok;
  ok.scenario = "layers";
  ok.N = {4};
  EXPECT_NO_THROW(validate(ok));
  auto bad = ok;
  bad.N = {0};
  EXPECT_THROW(validate(bad), DomainError);
  bad = ok;
  bad.horizon = 0.0;
  EXPECT_THROW(validate(bad), DomainError);
  bad = ok;
  bad.snapshots = 1;
  EXPECT_THROW(validate(bad), DomainError);
  bad = ok;
  bad.scenario = "nope";
  EXPECT_THROW(validate(bad), DomainError);
  bad = ok;
  bad.kind = "four";
  EXPECT_THROW(validate(bad), DomainError);
}

TEST(Pipelines, LayersRunAndReproduce) {
  RunConfig cfg;
  cfg.scenario = "layers";
  cfg.N = {4};
  cfg.out = scratch_dir("layers-a");
  auto summary = run(cfg);
  EXPECT_EQ(summary["schema_version"], kSummarySchemaVersion);
  const auto& sys = summary["results"][0]["systems"][0];
  EXPECT_EQ(sys["kind"], "two");
  EXPECT_LT(sys["free_transport_discrepancy"].get<double>(), 1e-10);
  EXPECT_EQ(sys["events"], 3);
  EXPECT_TRUE(fs::exists(cfg.out / "two_snapshots.csv"));
  EXPECT_TRUE(fs::exists(cfg.out / "two_events.csv"));

  auto again = cfg;
  again.out = scratch_dir("layers-b");
  run(again);
  for (const char* f : {"two_snapshots.csv", "two_events.csv", "two_euler.json"})
    EXPECT_EQ(slurp(cfg.out / f), slurp(again.out / f)) << f;
}

TEST(Pipelines, LayersBothReportsNonuniqueness) {
  RunConfig cfg;
  cfg.scenario = "layers";
  cfg.kind = "both";
  cfg.N = {20};
  cfg.out = scratch_dir("layers-both");
  auto summary = run(cfg);
  const auto& r = summary["results"][0];
  EXPECT_EQ(r["systems"].size(), 2u);
  EXPECT_EQ(r["systems"][1]["N"], 30);
  EXPECT_TRUE(r["nonuniqueness"]["coincide_at_zero"].get<bool>());
}

TEST(Pipelines, ScatteringTable) {
  RunConfig cfg;
  cfg.scenario = "scatter";
  cfg.sigma = 0.1;
  cfg.alphas = 5;
  cfg.speeds = {1.0, 2.0};
  auto dir = scratch_dir("scatter");
  fs::create_directories(dir);
  auto j = scattering_table(cfg, dir / "s.csv");
  EXPECT_EQ(j["rows"], 10);
  EXPECT_TRUE(j["all_T_below_bound"].get<bool>());
  EXPECT_LT(j["max_deflection_mismatch"].get<double>(), 1e-5);
  auto rows = read_csv(dir / "s.csv");
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0][0], "alpha");
  // alpha = 0 then alpha = sigma for the first speed.
  EXPECT_NEAR(std::stod(rows[1][3]), 0.0, 1e-6);
  EXPECT_NEAR(std::stod(rows[1][4]), std::numbers::pi / 2, 1e-6);
  EXPECT_NEAR(std::stod(rows[5][3]), std::numbers::pi / 2, 1e-8);
  EXPECT_NEAR(std::stod(rows[5][4]), 0.0, 1e-8);
  std::string text = slurp(dir / "s.csv");
  EXPECT_NE(text.find("# profile=reciprocal-linear"), std::string::npos);
  EXPECT_NE(text.find("# sigma=0.1"), std::string::npos);
}

TEST(Pipelines, ErrorRecordShape) {
  auto e = error_record("DomainError", "N must be positive");
  EXPECT_EQ(e["error"]["type"], "DomainError");
  EXPECT_EQ(e["schema_version"], kSummarySchemaVersion);
}

TEST(Pipelines, ThreadCap) {
  ::setenv("HYDROLIMIT_THREADS", "2", 1);
  EXPECT_EQ(thread_cap(8), 2);
  EXPECT_EQ(thread_cap(1), 1);
  ::setenv("HYDROLIMIT_THREADS", "junk", 1);
  EXPECT_EQ(thread_cap(3), 3);
  ::unsetenv("HYDROLIMIT_THREADS");
  EXPECT_EQ(thread_cap(5), 5);
}

TEST(Cli, InvalidNExitsWithTwo) {
  std::string out;
  auto dir = scratch_dir("cli-bad");
  EXPECT_EQ(run_cli("layers --N 0 --out " + dir.string(), &out), 2);
  auto j = json::parse(out);
  EXPECT_TRUE(j.contains("error"));
}

TEST(Cli, LayersSubcommand) {
  auto dir = scratch_dir("cli-layers");
  EXPECT_EQ(run_cli("layers --N 4 --kind two --out " + dir.string()), 0);
  auto j = json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(j["scenario"], "layers");
  EXPECT_LT(j["results"][0]["systems"][0]["free_transport_discrepancy"].get<double>(), 1e-10);
}

TEST(Cli, ConfigFile) {
  auto dir = scratch_dir("cli-config");
  fs::create_directories(dir);
  std::ofstream(dir / "run.ini") << "scenario = scatter\nsigma = 0.05\nalphas = 3\n";
  EXPECT_EQ(run_cli("--config " + (dir / "run.ini").string() + " --out " + (dir / "o").string()),
            0);
  auto j = json::parse(slurp(dir / "o" / "summary.json"));
  EXPECT_EQ(j["scenario"], "scatter");
  EXPECT_EQ(j["result"]["rows"], 3);
}
