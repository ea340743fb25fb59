// fogran - closed-form NDT evaluation, sweeps and delivery simulation

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "fogran/commands.hpp"

int main(int argc, char** argv) {
  using namespace fogran;
  CLI::App app{"NDT analysis and delivery simulation for the 2x2 D2D-aided F-RAN"};
  app.require_subcommand(1);

  using Command = CommandResult (*)(const Config&, Format);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"eval", "closed-form NDT, regime, D2D threshold and gain bound at one point", cmd_eval},
      {"sweep-mu", "minimum NDT versus cache size, with breakpoint rows", cmd_sweep_mu},
      {"sweep-rd", "pipelined and serial-achievable NDT versus D2D rate", cmd_sweep_rd},
      {"simulate", "synthesize a policy and simulate serial and pipelined delivery", cmd_simulate},
      {"gain-map", "observed pipelining gain over a (mu, r_f, r_d) grid", cmd_gain_map},
      {"convergence", "empirical NDT gap over block counts and log P values", cmd_convergence},
  };

  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::map<CLI::App*, Command> dispatch;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "flat key = value config file")->required();
    sub->add_option("--out", out_path, "output file (default: standard output)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    dispatch[sub] = fn;
  }
  CLI11_PARSE(app, argc, argv);

  Command cmd = nullptr;
  for (const auto& [sub, fn] : dispatch)
    if (sub->parsed()) cmd = fn;

  const auto result = run_command(cmd, config_path, format == "json" ? Format::Json : Format::Csv);
  if (!result.error.empty()) std::cerr << "fogran: " << result.error << "\n";
  if (!result.output.empty()) {
    if (out_path.empty()) {
      std::cout << result.output;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "fogran: cannot write '" << out_path << "'\n";
        return kExitIo;
      }
      out << result.output;
    }
  }
  return result.exit_code;
}
