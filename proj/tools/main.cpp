#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "expertgame/errors.hpp"
#include "expertgame/version.hpp"

namespace {

void add_common(CLI::App* sub, expertgame::cli::CommonFlags& flags,
                bool with_config = true) {
  if (with_config)
    sub->add_option("--config", flags.config_path, "experiment config file");
  sub->add_option("--out", flags.out_dir, "output directory");
  sub->add_option("--seed", flags.seed, "master seed override");
  sub->add_option("--engine", flags.engine,
                  "value engine: auto|brute|path|lattice");
  sub->add_option("--quad-order", flags.quad_order,
                  "tensor quadrature start order");
  sub->add_flag("--timing", flags.timing,
                "fill wall-time columns (non-reproducible bytes)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prediction games against adversarial markets: exact values, "
               "continuum limits, strategies"};
  app.set_version_flag("--version", expertgame::kVersion);
  app.require_subcommand(1);

  expertgame::cli::CommonFlags flags;

  std::string panel_path;
  CLI::App* validate =
      app.add_subcommand("validate", "check a panel file and its constants");
  validate->add_option("panel", panel_path, "panel file")->required();

  CLI::App* value = app.add_subcommand("value", "query the game value");
  add_common(value, flags);
  CLI::App* pde = app.add_subcommand("pde", "evaluate the continuum solution");
  add_common(pde, flags);
  CLI::App* converge =
      app.add_subcommand("converge", "rescaled-value convergence sweep");
  add_common(converge, flags);
  CLI::App* simulate =
      app.add_subcommand("simulate", "round-by-round strategy matchups");
  add_common(simulate, flags);
  CLI::App* local =
      app.add_subcommand("local", "tree sums and local-game averaging");
  add_common(local, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed())
      return expertgame::cli::cmd_validate(panel_path, std::cout);
    if (value->parsed()) return expertgame::cli::cmd_value(flags, std::cout);
    if (pde->parsed()) return expertgame::cli::cmd_pde(flags, std::cout);
    if (converge->parsed())
      return expertgame::cli::cmd_converge(flags, std::cout);
    if (simulate->parsed())
      return expertgame::cli::cmd_simulate(flags, std::cout);
    if (local->parsed()) return expertgame::cli::cmd_local(flags, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
