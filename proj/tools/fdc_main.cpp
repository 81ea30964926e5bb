#include <CLI11.hpp>
#include <cstdint>
#include <iostream>

#include "fdc/errors.hpp"
#include "fdc/experiments.hpp"

// Exit codes: 0 success, 1 convergence demanded but not reached,
// 2 usage/config error, 3 precondition or numerical-degeneracy violation,
// 4 unexpected internal error.
int main(int argc, char** argv) {
  CLI::App app{"Discrete fractional calculus and nonlocal variational experiments"};
  app.set_version_flag("--version", fdc::kToolVersion);
  app.require_subcommand(1);

  std::string config_path, out_override;
  std::uint64_t seed_override = 0;
  int threads_override = 1;

  CLI::App* run_cmd =
      app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("config", config_path, "Path to the config file")
      ->required();
  CLI::Option* seed_opt =
      run_cmd->add_option("--seed", seed_override, "Override params.seed");
  CLI::Option* threads_opt = run_cmd->add_option("--threads", threads_override,
                                                 "Override output.threads");
  CLI::Option* out_opt =
      run_cmd->add_option("--out", out_override, "Override output.dir");

  CLI::App* list_cmd = app.add_subcommand("list", "List available experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& name : fdc::list_experiments()) std::cout << name << "\n";
      return 0;
    }
    fdc::ExperimentConfig cfg = fdc::parse_config_file(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed_override;
    if (threads_opt->count() > 0) cfg.threads = threads_override;
    if (out_opt->count() > 0) cfg.out_dir = out_override;
    if (cfg.threads < 1) throw fdc::ConfigError("--threads must be >= 1");

    const int code = fdc::run(cfg);
    std::cout << cfg.experiment << ": " << (code == 0 ? "ok" : "not converged")
              << " (artifacts in " << cfg.out_dir << ")\n";
    return code;
  } catch (const fdc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fdc::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 3;
  } catch (const fdc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
