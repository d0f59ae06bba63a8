#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "becsim/config.hpp"
#include "becsim/errors.hpp"
#include "becsim/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"becsim: condensate formation kinetics in harmonic traps"};
  app.require_subcommand(1);

  std::string config_path, out_dir, mode;
  int threads = -1;

  const std::vector<std::pair<const char*, const char*>> subs = {
      {"spectrum", "enumerate trap modes, writes spectrum.csv"},
      {"rates", "build the full rate table, writes rates.csv"},
      {"evolve", "integrate the master equation, writes trajectory.csv"},
      {"steady", "kinetic steady state vs canonical oracle, writes steady.csv"},
      {"oracle", "canonical condensate distribution, writes oracle.csv"},
      {"sweep", "equilibrium curves over a temperature grid, writes sweep.csv"},
  };
  for (const auto& [name, desc] : subs) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--config", config_path, "run configuration file")
        ->required();
    cmd->add_option("--out", out_dir, "output directory (overrides out_dir)");
    cmd->add_option("--threads", threads,
                    "worker threads, 0 = all (overrides threads)");
    cmd->add_option("--mode", mode,
                    "rate evaluation mode (overrides rate_mode)")
        ->check(CLI::IsMember({"discrete", "semiclassical"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    becsim::RunConfig cfg = becsim::parse_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads >= 0) cfg.threads = threads;
    if (!mode.empty()) cfg.rate_mode = mode;
    const becsim::RunResult result = becsim::run(cfg, sub);
    for (const auto& path : result.outputs)
      std::cout << "wrote " << path << "\n";
    return 0;
  } catch (const becsim::ConfigError& e) {
    for (const auto& v : e.violations())
      std::cerr << "config error: " << v << "\n";
    return 2;
  } catch (const becsim::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const becsim::StructuralError& e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
