#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "nlisim/constants.hpp"
#include "nlisim/errors.hpp"
#include "nlisim/sellmeier.hpp"

namespace nlisim {

enum class PhaseMatching {
    TypeII_QPM,        // principal-axis indices plus a poling grating
    TypeII_AngleTuned, // critical phase matching; "e" axes use n_e(theta)
};

enum class Photon { Pump, Signal, Idler };

/// Which index function each photon sees.
///
/// For TypeII_QPM the names are principal axes of the medium ("x", "z").
/// For TypeII_AngleTuned they are "o" or "e"; "e" resolves to the
/// angle-dependent extraordinary index built from the medium's o and e axes.
struct AxisAssignment {
    std::string pump;
    std::string signal;
    std::string idler;

    const std::string& of(Photon p) const {
        switch (p) {
        case Photon::Pump: return pump;
        case Photon::Signal: return signal;
        default: return idler;
        }
    }
};

struct CrystalConfig {
    SellmeierSet medium;
    PhaseMatching pm_type = PhaseMatching::TypeII_QPM;
    AxisAssignment axes;
    double length = 1e-3;                 // m
    std::optional<double> poling_period;  // m, QPM only
    int grating_sign = 1;                 // grating vector enters delta_k as -grating_sign * 2pi/Lambda
    std::optional<double> theta;          // rad, angle-tuned only

    void validate() const {
        if (!(length > 0.0)) throw InvalidArgument("crystal length must be positive");
        for (Photon p : {Photon::Pump, Photon::Signal, Photon::Idler}) {
            const std::string& a = axes.of(p);
            if (pm_type == PhaseMatching::TypeII_AngleTuned) {
                if (a != "o" && a != "e") throw InvalidArgument("angle-tuned axes must be 'o' or 'e', got '" + a + "'");
            } else if (!medium.has_axis(a)) {
                throw InvalidArgument("medium '" + medium.material + "' has no axis '" + a + "'");
            }
        }
        if (pm_type == PhaseMatching::TypeII_QPM) {
            if (!poling_period || !(*poling_period > 0.0))
                throw InvalidArgument("QPM crystal requires a positive poling period");
            if (grating_sign != 1 && grating_sign != -1) throw InvalidArgument("grating_sign must be +1 or -1");
        } else {
            if (!theta || !(*theta > 0.0 && *theta < pi / 2.0))
                throw InvalidArgument("angle-tuned crystal requires theta in (0, pi/2)");
            if (!medium.has_axis("o") || !medium.has_axis("e"))
                throw InvalidArgument("angle-tuned medium needs 'o' and 'e' axes");
        }
    }
};

/// Extraordinary index at angle theta from the optic axis.
inline double angle_tuned_index(double n_o, double n_e90, double theta) {
    if (!(n_o > 1.0 && n_e90 > 1.0)) throw InvalidArgument("angle_tuned_index: indices must exceed 1");
    if (!(theta >= 0.0 && theta <= pi / 2.0)) throw InvalidArgument("angle_tuned_index: theta outside [0, pi/2]");
    if (theta == 0.0) return n_o;
    if (theta == pi / 2.0) return n_e90;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return 1.0 / std::sqrt(c * c / (n_o * n_o) + s * s / (n_e90 * n_e90));
}

inline double wavevector(double n, double omega) {
    if (!(omega > 0.0)) throw InvalidArgument("wavevector: omega must be positive");
    return n * omega / speed_of_light;
}

inline double photon_index(const CrystalConfig& config, Photon photon, double omega) {
    const double lambda = omega_to_wavelength(omega);
    const std::string& axis = config.axes.of(photon);
    if (config.pm_type == PhaseMatching::TypeII_AngleTuned) {
        const double n_o = refractive_index(config.medium, "o", lambda);
        if (axis == "o") return n_o;
        return angle_tuned_index(n_o, refractive_index(config.medium, "e", lambda), config.theta.value());
    }
    return refractive_index(config.medium, axis, lambda);
}

/// k_s + k_i - k_p with no grating contribution.
inline double bare_delta_k(const CrystalConfig& config, double omega_s, double omega_i) {
    const double omega_p = omega_s + omega_i;
    const double k_s = wavevector(photon_index(config, Photon::Signal, omega_s), omega_s);
    const double k_i = wavevector(photon_index(config, Photon::Idler, omega_i), omega_i);
    const double k_p = wavevector(photon_index(config, Photon::Pump, omega_p), omega_p);
    return k_s + k_i - k_p;
}

inline double delta_k(const CrystalConfig& config, double omega_s, double omega_i) {
    double dk = bare_delta_k(config, omega_s, omega_i);
    if (config.pm_type == PhaseMatching::TypeII_QPM && config.poling_period)
        dk -= config.grating_sign * 2.0 * pi / *config.poling_period;
    return dk;
}

/// Poling period that cancels the bare mismatch at (omega_s0, omega_i0).
/// Returns nullopt when the bare mismatch already vanishes (no grating needed).
inline std::optional<double> solve_poling_period(const CrystalConfig& config, double omega_s0, double omega_i0) {
    const double dk = bare_delta_k(config, omega_s0, omega_i0);
    const double scale = (omega_s0 + omega_i0) / speed_of_light;
    if (std::abs(dk) <= 1e-13 * scale) return std::nullopt;
    return 2.0 * pi / std::abs(dk);
}

/// Copy of config with the solved poling period and matching grating sign installed.
inline CrystalConfig with_solved_poling(CrystalConfig config, double omega_s0, double omega_i0) {
    const auto period = solve_poling_period(config, omega_s0, omega_i0);
    if (!period) throw InvalidArgument("design point is phase matched without a grating");
    config.poling_period = *period;
    config.grating_sign = bare_delta_k(config, omega_s0, omega_i0) > 0.0 ? 1 : -1;
    return config;
}

/// sinc(dk L / 2) exp(i dk L / 2).
inline complex phase_matching_function(const CrystalConfig& config, double omega_s, double omega_i) {
    const double x = 0.5 * delta_k(config, omega_s, omega_i) * config.length;
    if (x == 0.0) return {1.0, 0.0};
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return sinc * complex(std::cos(x), std::sin(x));
}

} // namespace nlisim
