#pragma once

namespace nvrabi {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kSqrt2 = 1.4142135623730950488016887242097;
inline constexpr double kSqrt3 = 1.7320508075688772935274463415059;

// Electron gyromagnetic ratio, 2.8 MHz/G expressed in rad s^-1 T^-1.
inline constexpr double kGauss = 1e-4;                       // tesla
inline constexpr double kGammaE = kTwoPi * 2.8e6 / kGauss;   // rad s^-1 T^-1

}  // namespace nvrabi
