#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace expertgame::cli {

/// Flat key-value experiment configuration: one "key = value" per line,
/// '#' comments, no nesting. Dotted keys group related settings
/// (panel.*, payoff, sweep.*, engine.*, sim.*, local.*, out.*).
class Config {
 public:
  Config() = default;

  static Config parse(std::istream& in);
  static Config load_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::string& fallback) const;
  std::vector<int> get_ints(const std::string& key,
                            const std::string& fallback) const;

  void set(const std::string& key, const std::string& value);

  /// Text the config hash is computed over: the canonicalized key=value
  /// listing, so overrides from flags participate in the hash.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

std::vector<double> parse_double_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace expertgame::cli
