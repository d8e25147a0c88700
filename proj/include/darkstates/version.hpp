#pragma once

namespace darkstates {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace darkstates
