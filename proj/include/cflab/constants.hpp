#pragma once

#include <numbers>

namespace cflab::constants {

inline constexpr long double kLn2 = 0.693147180559945309417232121458176568L;
inline constexpr long double kLn10 = 2.302585092994045684017960784477789L;
inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

// Euler-Mascheroni constant.
inline constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

// Eight-decimal gamma.
// c = 2.101893933 is 1/(2^{e^-gamma} - 1) evaluated with it.
inline constexpr long double kGammaEightDecimals = 0.57721566L;

// Reference values used as targets for the running statistics.
inline constexpr double kKhinchin = 2.6854520010653064453;
inline constexpr double kLevy = 3.2758229187218111598;

}  // namespace cflab::constants
