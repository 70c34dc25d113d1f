#pragma once

namespace purcell {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
// magnetic flux quantum h/(2e), Wb
inline constexpr double kPhi0 = 2.067833848e-15;

} // namespace purcell
