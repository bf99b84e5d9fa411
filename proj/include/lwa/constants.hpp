// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

namespace lwa {

using cplx = std::complex<double>;

namespace constants {

inline constexpr double c0 = 299792458.0;            // m/s
inline constexpr double mu0 = 1.25663706212e-6;      // H/m
inline constexpr double eta0 = 376.730313668;        // ohms
inline constexpr double pi = 3.14159265358979323846;

} // namespace constants

inline double deg2rad(double deg) { return deg * constants::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / constants::pi; }

/// Free-space wavenumber 2*pi*f/c0 in rad/m.
inline double k0_of(double f_hz) { return 2.0 * constants::pi * f_hz / constants::c0; }

} // namespace lwa
