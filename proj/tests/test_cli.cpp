#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "fogran/commands.hpp"

using namespace fogran;

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) break;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

CommandResult run(CommandResult (*cmd)(const Config&, Format), const std::string& text, Format f = Format::Csv) {
  return cmd(Config::parse(text), f);
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("fogran_test_" + name);
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(FOGRAN_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool has_row(const std::vector<std::vector<std::string>>& rows, double mu, double ndt) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (std::abs(std::stod(rows[i][0]) - mu) < 1e-11 && std::abs(std::stod(rows[i][1]) - ndt) < 1e-11) return true;
  return false;
}

}  // namespace

TEST(Eval, EdgeLimitedPoint) {
  const auto r = run(cmd_eval, "mu = 0.5\nr_f = 0.25\nr_d = 0\n");
  EXPECT_EQ(r.exit_code, kExitOk);
  const auto rows = csv_rows(r.output);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"mu", "r_f", "r_d", "ndt", "regime", "threshold_raw", "threshold",
                                               "d2d_beneficial", "gain_bound"}));
  EXPECT_EQ(rows[1][3], "1.2");
  EXPECT_EQ(rows[1][4], "EdgeD2DLimited");
  EXPECT_EQ(rows[1][6], "0.25");
}

TEST(Eval, TieAndInfeasible) {
  EXPECT_EQ(csv_rows(run(cmd_eval, "mu = 0\nr_f = 1\nr_d = 0\n").output)[1][4], "tie(Ideal)");
  const auto inf = csv_rows(run(cmd_eval, "mu = 0.3\nr_f = 0\nr_d = 0.5\n").output);
  EXPECT_EQ(inf[1][3], "inf");
  EXPECT_EQ(inf[1][4], "Infeasible");
}

TEST(Eval, JsonMirrorsColumns) {
  const auto r = run(cmd_eval, "mu = 0.3\nr_f = 0\nr_d = 0.5\n", Format::Json);
  const auto j = Json::parse(r.output);
  EXPECT_EQ(j["ndt"], "inf");
  EXPECT_EQ(j["regime"], "Infeasible");
  EXPECT_EQ(j["d2d_beneficial"], false);
}

TEST(SweepMu, KnotRowsAndOrdering) {
  const auto rows = csv_rows(run(cmd_sweep_mu, "r_f = 0.25\nr_d = 0.125\nsweep_steps = 101\n").output);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"mu", "ndt", "ndt_no_d2d", "regime"}));
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_LT(std::stod(rows[i - 1][0]), std::stod(rows[i][0]));
  EXPECT_TRUE(has_row(rows, 0.0, 4.0));
  EXPECT_TRUE(has_row(rows, 0.35, 1.2));
  EXPECT_TRUE(has_row(rows, 0.625, 1.0));
  EXPECT_TRUE(has_row(rows, 1.0, 1.0));
}

TEST(SweepMu, NoD2dColumnsIdentical) {
  const auto rows = csv_rows(run(cmd_sweep_mu, "r_f = 0.25\nr_d = 0\nsweep_steps = 21\n").output);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][1], rows[i][2]);
  EXPECT_TRUE(has_row(rows, 1.0 / 3.0, 4.0 / 3.0));
  EXPECT_TRUE(has_row(rows, 0.75, 1.0));
}

TEST(SweepMu, LargeD2dKnot) {
  const auto rows = csv_rows(run(cmd_sweep_mu, "r_f = 0.25\nr_d = 0.5\nsweep_steps = 11\n").output);
  EXPECT_TRUE(has_row(rows, 0.375, 1.0));
}

TEST(SweepMu, InvalidRange) {
  EXPECT_THROW(run(cmd_sweep_mu, "r_f = 0.25\nr_d = 0\nsweep_start = 0.8\nsweep_stop = 0.2\n"), ValidationError);
  EXPECT_THROW(run(cmd_sweep_mu, "r_f = 0.25\nr_d = 0\nsweep_steps = 1\n"), ValidationError);
}

TEST(SweepRd, FigureFiveShape) {
  const auto rows = csv_rows(run(cmd_sweep_rd, "mu = 0.5\nr_f = 0.25\nsweep_steps = 41\n").output);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"r_d", "ndt_pipelined", "ndt_serial_achievable", "threshold_marker"}));
  EXPECT_EQ(rows[1][1], "1.2");
  int markers = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double r_d = std::stod(rows[i][0]);
    const double ndt = std::stod(rows[i][1]);
    if (rows[i][3] == "1") {
      ++markers;
      EXPECT_EQ(r_d, 0.25);
    }
    if (r_d >= 0.25) { EXPECT_EQ(ndt, 1.0); }
    if (i > 1 && r_d <= 0.25) { EXPECT_LT(ndt, std::stod(rows[i - 1][1])); }
  }
  EXPECT_EQ(markers, 1);
}

TEST(SweepRd, FronthaulRateOneIsFlat) {
  const auto rows = csv_rows(run(cmd_sweep_rd, "mu = 0.5\nr_f = 1\nsweep_steps = 11\n").output);
  EXPECT_EQ(rows[1][3], "1");
  EXPECT_EQ(rows[1][0], "0");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][1], "1");
}

TEST(SweepRd, SerialAchievableFlatAtOnePointFive) {
  const auto rows =
      csv_rows(run(cmd_sweep_rd, "mu = 0.5\nr_f = 0\nsweep_start = 0.5\nsweep_stop = 1\nsweep_steps = 6\n").output);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], "1");
    EXPECT_EQ(rows[i][2], "1.5");
  }
}

TEST(GainMap, NamedPointsAndFactorThree) {
  const auto named =
      csv_rows(run(cmd_gain_map, "mu_values = 0.49\nr_f_values = 0.02\nr_d_values = 0.5\n").output);
  EXPECT_EQ(named[0], (std::vector<std::string>{"mu", "r_f", "r_d", "pipelined_ndt", "serial_achievable_ndt",
                                                "observed_gain", "bound"}));
  EXPECT_NEAR(std::stod(named[1][5]), 2.49, 1e-9);
  const auto zero = csv_rows(run(cmd_gain_map, "mu_values = 0\nr_f_values = 1\nr_d_values = 0\n").output);
  EXPECT_NEAR(std::stod(zero[1][5]), 2.0, 1e-12);

  const auto grid = csv_rows(run(cmd_gain_map, "grid_steps = 6\n").output);
  EXPECT_EQ(grid.size(), 1u + 6 * 6 * 6);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i][5] == "nan") continue;
    EXPECT_LE(std::stod(grid[i][5]), 3.0 + 1e-9);
  }
}

TEST(Simulate, Examples) {
  const auto full = Json::parse(
      run(cmd_simulate, "mu = 1\nr_f = 0\nr_d = 0\nfile_bits = 10000\nlog_p = 10\nblocks = 10\n", Format::Json).output);
  EXPECT_DOUBLE_EQ(full["serial"]["empirical_ndt"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(full["pipelined"]["empirical_ndt"].get<double>(), 1.2);

  const auto cloud = Json::parse(
      run(cmd_simulate, "mu = 0\nr_f = 1\nr_d = 0\nfile_bits = 10000\nlog_p = 10\nblocks = 100\n", Format::Json).output);
  EXPECT_DOUBLE_EQ(cloud["serial"]["empirical_ndt"].get<double>(), 2.0);
  EXPECT_DOUBLE_EQ(cloud["pipelined"]["empirical_ndt"].get<double>(), 1.02);

  std::vector<std::string> keys;
  for (const auto& [k, v] : cloud["pipelined"].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"total_symbols", "busy", "decode_success", "empirical_ndt",
                                            "gap_to_closed_form"}));
  keys.clear();
  for (const auto& [k, v] : cloud["pipelined"]["busy"].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"fronthaul_1", "fronthaul_2", "edge", "d2d_12", "d2d_21"}));
}

TEST(Simulate, InfeasibleRecord) {
  const auto r = run(cmd_simulate, "mu = 0.3\nr_f = 0\nr_d = 0.5\nfile_bits = 1000\nlog_p = 10\n");
  EXPECT_EQ(r.exit_code, kExitInfeasible);
  EXPECT_NE(r.output.find("infeasible"), std::string::npos);
}

TEST(Simulate, ConvergenceSeriesAppended) {
  const auto j = Json::parse(run(cmd_simulate,
                                 "mu = 0.5\nr_f = 0.25\nr_d = 0.25\nfile_bits = 1000000\nlog_p = 1000\nblocks = 10\n"
                                 "blocks_list = 1, 10, 100\n",
                                 Format::Json)
                                 .output);
  ASSERT_EQ(j["convergence"].size(), 3u);
  EXPECT_NEAR(j["convergence"][2]["closed_form_gap"].get<double>(), 0.02, 1e-12);
}

TEST(Convergence, Table) {
  const auto rows = csv_rows(
      run(cmd_convergence, "mu = 0.5\nr_f = 0.25\nr_d = 0.25\nfile_bits = 1000000\nlog_p = 1000\nblocks_list = 1, 10, 100\n")
          .output);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"blocks", "log_p", "file_bits", "total_symbols", "empirical_ndt",
                                               "closed_form_gap"}));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[3][5], "0.02");
}

TEST(Determinism, RepeatedRunsAreByteIdentical) {
  const std::string text = "mu = 0.5\nr_f = 0.25\nr_d = 0.125\nfile_bits = 100000\nlog_p = 10\nblocks = 10\n";
  for (auto cmd : {cmd_eval, cmd_simulate, cmd_convergence})
    for (auto f : {Format::Csv, Format::Json}) EXPECT_EQ(run(cmd, text, f).output, run(cmd, text, f).output);
}

TEST(Binary, ExitCodesAndOutputFile) {
  const auto good = temp_file("good.cfg", "mu = 0.5\nr_f = 0.25\nr_d = 0\n");
  const auto out = std::filesystem::temp_directory_path() / "fogran_test_out.csv";
  EXPECT_EQ(run_binary("eval --config " + good.string() + " --out " + out.string()), kExitOk);
  EXPECT_EQ(slurp(out), run(cmd_eval, "mu = 0.5\nr_f = 0.25\nr_d = 0\n").output);

  const auto bad = temp_file("bad.cfg", "mu = 0.5\nr_f = oops\n");
  EXPECT_EQ(run_binary("eval --config " + bad.string()), kExitParse);
  const auto range = temp_file("range.cfg", "mu = 1.5\nr_f = 0.25\nr_d = 0\n");
  EXPECT_EQ(run_binary("eval --config " + range.string()), kExitValidation);
  const auto infeasible = temp_file("inf.cfg", "mu = 0.3\nr_f = 0\nr_d = 0.5\nfile_bits = 1000\nlog_p = 10\n");
  EXPECT_EQ(run_binary("simulate --config " + infeasible.string()), kExitInfeasible);
  EXPECT_EQ(run_binary("eval --config /nonexistent/fogran.cfg"), kExitIo);
  EXPECT_NE(run_binary("eval --config " + good.string() + " --format xml"), kExitOk);
}

TEST(Binary, ParseErrorNamesLine) {
  const auto r = run_command(cmd_eval, temp_file("line.cfg", "mu = 0.5\n# c\nr_f = 0.2.5\nr_d = 0\n").string(), Format::Csv);
  EXPECT_EQ(r.exit_code, kExitParse);
  EXPECT_NE(r.error.find("line 3"), std::string::npos);
}
