#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "snoise/csv.hpp"
#include "snoise/scenario.hpp"

using namespace snoise;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("snoise_scenario_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const char* kSimulate = R"([run]
scenario = simulate
seed = 42
n_paths = 7
grid_points = 6
csv_paths = 3
[kernel]
kind = exponential
a = 1
b = 2
[compensator]
rate = constant 3
marks = normal 0 1
)";
}  // namespace

TEST(Csv, FormatsRoundTripDoubles) {
  CsvWriter w({"a", "b"});
  w.field(0.1).field(std::string_view("x,y")).end_row();
  EXPECT_EQ(w.str(), "a,b\n0.10000000000000001,\"x,y\"\n");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, AtomicWriteLeavesNoTemporaries) {
  const auto dir = fresh_dir("atomic");
  write_file_atomic(dir / "sub" / "f.csv", "x\n1\n");
  EXPECT_EQ(slurp(dir / "sub" / "f.csv"), "x\n1\n");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "sub")) files += e.is_regular_file();
  EXPECT_EQ(files, 1u);
}

TEST(Scenario, SimulateWritesContractedCsv) {
  const auto dir = fresh_dir("simulate");
  const auto out = run_scenario(build_config(IniDocument::parse(kSimulate)), dir);
  EXPECT_EQ(out.exit_code, kExitPass);
  const auto paths = slurp(dir / "paths.csv");
  EXPECT_EQ(paths.rfind("path_id,t,S_t\n", 0), 0u);
  EXPECT_EQ(std::count(paths.begin(), paths.end(), '\n'), 1 + 7 * 6);
  EXPECT_TRUE(fs::exists(dir / "events.csv"));
  EXPECT_TRUE(fs::exists(dir / "decomposition.csv"));
  const auto report = slurp(dir / "report.txt");
  EXPECT_NE(report.find("resolved config"), std::string::npos);
  EXPECT_NE(report.find("seed = 42"), std::string::npos);
  EXPECT_NE(report.find("|delta|/SE"), std::string::npos);
}

TEST(Scenario, RepeatedRunsAreByteIdentical) {
  const auto cfg = build_config(IniDocument::parse(kSimulate));
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const auto oa = run_scenario(cfg, a);
  run_scenario(cfg, b);
  for (const auto& f : oa.files) EXPECT_EQ(slurp(f), slurp(b / f.filename())) << f;
}

TEST(Scenario, SeedChangesOutput) {
  auto cfg = build_config(IniDocument::parse(kSimulate));
  const auto a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
  run_scenario(cfg, a);
  cfg.run.seed = 43;
  run_scenario(cfg, b);
  EXPECT_NE(slurp(a / "paths.csv"), slurp(b / "paths.csv"));
}

TEST(Scenario, MarkovTestReportsClassification) {
  const std::string text = "[run]\nscenario = markov-test\nseed = 1\n[kernel]\nkind = exponential\na = 1.5\nb = 0.25\n"
                           "[markov]\nexpect = true\n";
  const auto dir = fresh_dir("markov");
  const auto out = run_scenario(build_config(IniDocument::parse(text)), dir);
  EXPECT_EQ(out.exit_code, kExitPass);
  EXPECT_EQ(out.checks, 2u);
  const std::string wrong = "[run]\nscenario = markov-test\nseed = 1\n[kernel]\nkind = power_law\nc = 1\n"
                            "[markov]\nexpect = true\n";
  EXPECT_EQ(run_scenario(build_config(IniDocument::parse(wrong)), dir).exit_code, kExitCheckFailed);
}

TEST(Scenario, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorCode::ConfigError), kExitConfigError);
  EXPECT_EQ(exit_code_for(ErrorCode::QuadratureFailure), kExitNumericalFailure);
  EXPECT_EQ(exit_code_for(ErrorCode::BlowUp), kExitNumericalFailure);
}
