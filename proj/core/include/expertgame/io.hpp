#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace expertgame {

/// Shortest round-trip decimal form; keeps emitted files byte-stable.
void append_double(std::string& out, double v);
std::string format_double(double v);

/// FNV-1a, used to stamp outputs with a hash of their configuration.
std::uint64_t fnv1a64(std::string_view data);
std::string hash_hex(std::uint64_t h);

/// Trailing "# version=... config_hash=... seed=..." comment line.
std::string csv_metadata_line(std::string_view config_hash,
                              std::uint64_t seed);

}  // namespace expertgame
