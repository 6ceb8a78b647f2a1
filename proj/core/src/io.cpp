#include "expertgame/io.hpp"

#include <charconv>

#include "expertgame/version.hpp"

namespace expertgame {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, ptr);
}

std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string csv_metadata_line(std::string_view config_hash,
                              std::uint64_t seed) {
  std::string line = "# version=";
  line += kVersion;
  line += " config_hash=";
  line += config_hash;
  line += " seed=";
  line += std::to_string(seed);
  return line;
}

}  // namespace expertgame
