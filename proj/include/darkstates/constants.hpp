#pragma once

namespace darkstates {

/// hbar * c in eV nm. The only place either constant enters the model.
inline constexpr double kHbarC = 197.3269804;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace darkstates
