#pragma once

namespace wgcav::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0;          // m/s
inline constexpr double hbar = 1.054571817e-34;                // J*s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m

} // namespace wgcav::constants
