#pragma once

namespace expertgame {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace expertgame
