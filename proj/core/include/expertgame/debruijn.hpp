#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expertgame/errors.hpp"

namespace expertgame {

/// One market move: the stock goes up (+1) or down (-1).
enum class Bit : int { down = -1, up = +1 };

inline int sign(Bit b) { return static_cast<int>(b); }
inline Bit bit_from_sign(int s) { return s >= 0 ? Bit::up : Bit::down; }

/// A window of the last d market moves, i.e. a node of the binary
/// de Bruijn graph of dimension d.
///
/// Encoding: bit j of `code` holds move j of the window, with j = 0 the
/// oldest move and j = d-1 the newest; a set bit means +1, a clear bit
/// means -1. Shifting drops bit 0 and inserts the new move at bit d-1.
/// This encoding is also used by the panel file format and the CLI.
class HistoryState {
 public:
  /// Guard for 2^d enumerations and tables.
  static constexpr int kMaxWindow = 24;

  HistoryState(int d, std::uint32_t code) : d_(d), code_(code) {
    if (d < 1 || d > kMaxWindow)
      throw WindowTooLarge("window length d=" + std::to_string(d) +
                           " outside [1," + std::to_string(kMaxWindow) + "]");
    if (code >= (std::uint32_t{1} << d))
      throw Error("state code out of range for d=" + std::to_string(d));
  }

  int d() const { return d_; }
  std::uint32_t code() const { return code_; }

  /// Move j of the window, j = 0 oldest .. d-1 newest.
  Bit at(int j) const { return (code_ >> j) & 1u ? Bit::up : Bit::down; }

  /// Drop the oldest move and append b as the newest.
  HistoryState shift(Bit b) const {
    std::uint32_t next = code_ >> 1;
    if (b == Bit::up) next |= std::uint32_t{1} << (d_ - 1);
    return HistoryState(d_, next);
  }

  HistoryState shift_word(std::span<const Bit> word) const {
    HistoryState m = *this;
    for (Bit b : word) m = m.shift(b);
    return m;
  }

  HistoryState plus() const { return shift(Bit::up); }
  HistoryState minus() const { return shift(Bit::down); }

  /// Canonical text form, oldest move first: "+-+".
  std::string to_string() const;

  /// Accepts both "+-+" and "101" forms (1 means +1, 0 means -1).
  static HistoryState parse(std::string_view text);

  friend bool operator==(const HistoryState&, const HistoryState&) = default;

 private:
  int d_;
  std::uint32_t code_;
};

/// All 2^d states in increasing code order.
std::vector<HistoryState> enumerate_states(int d);

inline std::size_t state_count(int d) { return std::size_t{1} << d; }

}  // namespace expertgame
