#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"

namespace expertgame::cli {

/// Flag overrides shared by the subcommands; applied on top of the
/// config file before anything is derived from it.
struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;  // brute | path | lattice
  std::optional<int> quad_order;
  bool timing = false;  // fill wall-time columns (breaks byte-identity)
};

Config load_config(const CommonFlags& flags);

int cmd_validate(const std::string& panel_path, std::ostream& out);
int cmd_value(const CommonFlags& flags, std::ostream& out);
int cmd_pde(const CommonFlags& flags, std::ostream& out);
int cmd_converge(const CommonFlags& flags, std::ostream& out);
int cmd_simulate(const CommonFlags& flags, std::ostream& out);
int cmd_local(const CommonFlags& flags, std::ostream& out);

}  // namespace expertgame::cli
