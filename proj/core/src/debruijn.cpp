#include "expertgame/debruijn.hpp"

namespace expertgame {

std::string HistoryState::to_string() const {
  std::string out(static_cast<std::size_t>(d_), '-');
  for (int j = 0; j < d_; ++j)
    if (at(j) == Bit::up) out[static_cast<std::size_t>(j)] = '+';
  return out;
}

HistoryState HistoryState::parse(std::string_view text) {
  if (text.empty()) throw Error("empty history state");
  int d = static_cast<int>(text.size());
  if (d > kMaxWindow)
    throw WindowTooLarge("state text longer than " +
                         std::to_string(kMaxWindow) + " moves");
  std::uint32_t code = 0;
  for (int j = 0; j < d; ++j) {
    char c = text[static_cast<std::size_t>(j)];
    if (c == '+' || c == '1') {
      code |= std::uint32_t{1} << j;
    } else if (c != '-' && c != '0') {
      throw Error(std::string("bad history symbol '") + c +
                  "' (expected one of +-10)");
    }
  }
  return HistoryState(d, code);
}

std::vector<HistoryState> enumerate_states(int d) {
  if (d < 1 || d > HistoryState::kMaxWindow)
    throw WindowTooLarge("window length d=" + std::to_string(d) +
                         " outside [1," +
                         std::to_string(HistoryState::kMaxWindow) + "]");
  std::vector<HistoryState> states;
  states.reserve(state_count(d));
  for (std::uint32_t c = 0; c < (std::uint32_t{1} << d); ++c)
    states.emplace_back(d, c);
  return states;
}

}  // namespace expertgame
