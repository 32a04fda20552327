#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace nlisim {

using complex = std::complex<double>;

inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double pi = std::numbers::pi;
inline constexpr long double two_pi_l = 2.0L * std::numbers::pi_v<long double>;

/// Angular frequency (rad/s) of vacuum wavelength (m), and back.
inline double wavelength_to_omega(double wavelength) { return 2.0 * pi * speed_of_light / wavelength; }
inline double omega_to_wavelength(double omega) { return 2.0 * pi * speed_of_light / omega; }

/// exp(i*phase) for phases of order 1e4 rad and above.
///
/// Optical phases omega*tau reach ~1e4 rad for picosecond delays, where a
/// double carries only ~1e-12 absolute accuracy. The phase is accumulated and
/// reduced modulo 2*pi in extended precision before the trig call.
inline complex unit_phasor(long double phase) {
    const long double reduced = std::fmod(phase, two_pi_l);
    return {static_cast<double>(std::cos(reduced)), static_cast<double>(std::sin(reduced))};
}

} // namespace nlisim
