#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nlisim/constants.hpp"
#include "nlisim/dispersion.hpp"
#include "nlisim/errors.hpp"
#include "nlisim/spectral.hpp"

namespace nlisim {

/// Gaussian pump. sigma is the standard deviation of the intensity
/// spectrum in wavelength, so FWHM = 2 sqrt(2 ln 2) sigma.
struct PumpConfig {
    double center_wavelength = 775e-9; // m
    double sigma = 2.0e-9;             // m

    void validate() const {
        if (!(center_wavelength > 0.0)) throw InvalidArgument("pump center wavelength must be positive");
        if (!(sigma > 0.0)) throw InvalidArgument("pump sigma must be positive");
    }
    double center_omega() const { return wavelength_to_omega(center_wavelength); }
    /// Linearized at the center wavelength.
    double sigma_omega() const {
        return 2.0 * pi * speed_of_light * sigma / (center_wavelength * center_wavelength);
    }
    double fwhm() const { return 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma; }
};

/// Per-crystal delays (s) applied after crystal mu, for each photon.
struct DelaySchedule {
    std::vector<double> tau_p;
    std::vector<double> tau_s;
    std::vector<double> tau_i;

    std::size_t n_crystals() const noexcept { return tau_p.size(); }

    void validate() const {
        if (tau_p.empty()) throw InvalidArgument("delay schedule needs at least one crystal");
        if (tau_s.size() != tau_p.size() || tau_i.size() != tau_p.size())
            throw InvalidArgument("delay schedule: pump, signal and idler lists differ in length");
        for (const auto* v : {&tau_p, &tau_s, &tau_i})
            for (double t : *v)
                if (!std::isfinite(t)) throw InvalidArgument("delay schedule: non-finite delay");
    }
};

/// Flat loss of x_db per free-space/fiber interface.
struct LossModel {
    double x_db = 0.0;

    void validate() const {
        if (!(x_db >= 0.0) || !std::isfinite(x_db)) throw InvalidArgument("loss must be a finite value >= 0 dB");
    }
    double amplitude_factor() const { return std::pow(10.0, -x_db / 20.0); }
    /// Amplitude weight of pairs born in crystal mu (1-based): factor^(2 mu - 1).
    double weight(std::size_t mu) const {
        if (x_db == 0.0) return 1.0;
        return std::pow(amplitude_factor(), static_cast<double>(2 * mu - 1));
    }
};

inline complex pump_envelope(const PumpConfig& pump, double omega_p) {
    if (!(omega_p > 0.0)) throw InvalidArgument("pump_envelope: omega_p must be positive");
    const double d = omega_p - pump.center_omega();
    const double s = pump.sigma_omega();
    return {std::exp(-d * d / (4.0 * s * s)), 0.0};
}

/// Single-crystal amplitude alpha(ws + wi) * PMF(ws, wi); not normalized.
inline JointAmplitude jsa0(const PumpConfig& pump, const CrystalConfig& crystal, const FrequencyGrid& grid_s,
                           const FrequencyGrid& grid_i) {
    pump.validate();
    crystal.validate();
    ComplexMatrix m(grid_s.size(), grid_i.size());
    for (std::size_t s = 0; s < grid_s.size(); ++s) {
        const double ws = grid_s.omega(s);
        for (std::size_t i = 0; i < grid_i.size(); ++i) {
            const double wi = grid_i.omega(i);
            m(s, i) = pump_envelope(pump, ws + wi) * phase_matching_function(crystal, ws, wi);
        }
    }
    return JointAmplitude(grid_s, grid_i, std::move(m));
}

namespace detail {

struct CrystalDelays {
    long double pump_upstream;     // sum_{m <= mu} tau_p
    long double signal_downstream; // sum_{n >= mu} tau_s
    long double idler_downstream;  // sum_{n >= mu} tau_i
};

inline CrystalDelays accumulated_delays(const DelaySchedule& sched, std::size_t mu) {
    CrystalDelays d{0.0L, 0.0L, 0.0L};
    for (std::size_t m = 0; m < mu; ++m) d.pump_upstream += sched.tau_p[m];
    for (std::size_t n = mu - 1; n < sched.n_crystals(); ++n) {
        d.signal_downstream += sched.tau_s[n];
        d.idler_downstream += sched.tau_i[n];
    }
    return d;
}

inline void check_crystal_index(const DelaySchedule& sched, std::size_t mu) {
    if (mu < 1 || mu > sched.n_crystals())
        throw InvalidArgument("crystal index " + std::to_string(mu) + " outside 1.." +
                              std::to_string(sched.n_crystals()));
}

} // namespace detail

/// Phase factor of pairs born in crystal mu (1-based): the pump carries every
/// delay upstream of mu, signal and idler every delay from mu downstream.
inline complex beta_mu(const DelaySchedule& sched, std::size_t mu, double omega_s, double omega_i) {
    sched.validate();
    detail::check_crystal_index(sched, mu);
    const auto d = detail::accumulated_delays(sched, mu);
    const long double ws = omega_s;
    const long double wi = omega_i;
    return unit_phasor((ws + wi) * d.pump_upstream + ws * d.signal_downstream + wi * d.idler_downstream);
}

inline complex beta_total(const DelaySchedule& sched, const LossModel& loss, double omega_s, double omega_i) {
    loss.validate();
    complex total{0.0, 0.0};
    for (std::size_t mu = 1; mu <= sched.n_crystals(); ++mu)
        total += loss.weight(mu) * beta_mu(sched, mu, omega_s, omega_i);
    return total;
}

/// 4 e^{i 3 ws tau / 2} e^{i 2 wi tau} cos((ws + wi) tau / 4) cos((ws - wi) tau / 4)
inline complex beta_grid_closed(double tau, double omega_s, double omega_i) {
    const long double t = tau;
    const long double ws = omega_s;
    const long double wi = omega_i;
    const long double c = std::cos((ws + wi) * t / 4.0L) * std::cos((ws - wi) * t / 4.0L);
    return 4.0 * static_cast<double>(c) * unit_phasor(1.5L * ws * t + 2.0L * wi * t);
}

/// 4 e^{i 3 (ws + wi) tau / 2} cos^2((ws - wi) tau / 4)
inline complex beta_hde_closed(double tau, double omega_s, double omega_i) {
    const long double t = tau;
    const long double ws = omega_s;
    const long double wi = omega_i;
    const long double c = std::cos((ws - wi) * t / 4.0L);
    return 4.0 * static_cast<double>(c * c) * unit_phasor(1.5L * (ws + wi) * t);
}

/// beta^(mu) sampled on the grid plane, one matrix per crystal.
///
/// beta^(mu) = e^{i ws (P + S)} e^{i wi (P + I)} factorizes, so each map is an
/// outer product of a signal and an idler phasor vector.
inline std::vector<ComplexMatrix> crystal_phase_maps(const DelaySchedule& sched, const FrequencyGrid& grid_s,
                                                     const FrequencyGrid& grid_i) {
    sched.validate();
    std::vector<ComplexMatrix> maps;
    maps.reserve(sched.n_crystals());
    for (std::size_t mu = 1; mu <= sched.n_crystals(); ++mu) {
        const auto d = detail::accumulated_delays(sched, mu);
        ComplexVector row(grid_s.size());
        ComplexVector col(grid_i.size());
        for (std::size_t s = 0; s < grid_s.size(); ++s)
            row(s) = unit_phasor(static_cast<long double>(grid_s.omega(s)) * (d.pump_upstream + d.signal_downstream));
        for (std::size_t i = 0; i < grid_i.size(); ++i)
            col(i) = unit_phasor(static_cast<long double>(grid_i.omega(i)) * (d.pump_upstream + d.idler_downstream));
        maps.emplace_back(row * col.transpose());
    }
    return maps;
}

inline ComplexMatrix combine_phase_maps(const std::vector<ComplexMatrix>& maps, const LossModel& loss) {
    loss.validate();
    ComplexMatrix total = ComplexMatrix::Zero(maps.front().rows(), maps.front().cols());
    for (std::size_t mu = 1; mu <= maps.size(); ++mu) total += loss.weight(mu) * maps[mu - 1];
    return total;
}

/// |beta|^2 / max |beta|^2 over the grid plane.
inline RealMatrix pseudo_normalized_modulation(const DelaySchedule& sched, const LossModel& loss,
                                               const FrequencyGrid& grid_s, const FrequencyGrid& grid_i) {
    RealMatrix m = combine_phase_maps(crystal_phase_maps(sched, grid_s, grid_i), loss).cwiseAbs2();
    const double peak = m.maxCoeff();
    if (peak > 0.0) m /= peak;
    return m;
}

/// Normalized JSA = beta_total * JSA0 on the grid plane.
inline JointAmplitude assemble_jsa(const PumpConfig& pump, const CrystalConfig& crystal, const DelaySchedule& sched,
                                   const LossModel& loss, const FrequencyGrid& grid_s, const FrequencyGrid& grid_i) {
    const JointAmplitude base = jsa0(pump, crystal, grid_s, grid_i);
    ComplexMatrix beta = combine_phase_maps(crystal_phase_maps(sched, grid_s, grid_i), loss);
    return normalize(JointAmplitude(grid_s, grid_i, base.values().cwiseProduct(beta)));
}

// ---------------------------------------------------------------------------
// Presets

enum class PresetKind { Grid, Hde };

struct Setup {
    PumpConfig pump;
    CrystalConfig crystal;
    DelaySchedule schedule;
    LossModel loss;
    FrequencyGrid grid_s;
    FrequencyGrid grid_i;
    // Fundamental delay the schedule was built from; 0 for custom schedules.
    double tau = 0.0;

    JointAmplitude amplitude() const { return assemble_jsa(pump, crystal, schedule, loss, grid_s, grid_i); }
    JointAmplitude unmodulated() const { return normalize(jsa0(pump, crystal, grid_s, grid_i)); }
};

inline DelaySchedule grid_schedule(double tau) {
    return {{0.0, tau, 0.0, tau}, {tau, tau / 2.0, 0.0, 0.0}, {0.0, tau / 2.0, tau, 0.0}};
}

inline DelaySchedule hde_schedule(double tau) {
    return {{0.0, tau, tau / 2.0, 0.0}, {0.0, tau, 0.0, 0.0}, {2.0 * tau, 0.0, 0.0, 0.0}};
}

inline constexpr std::size_t default_grid_points = 512;
inline constexpr double grid_preset_span = 16e-9;
inline constexpr double hde_preset_span = 120e-9;

/// ppKTP type-II (x -> xz) with a poling period solved for 775 -> 1550 + 1550 nm,
/// or angle-tuned LiNbO3 type-II (eoe) at theta = 30 deg. Both 1 mm long,
/// pumped at 775 nm with sigma = 2 nm.
inline Setup preset(PresetKind kind, std::size_t n_points = default_grid_points) {
    const PumpConfig pump{775e-9, 2.0e-9};
    const double omega_deg = pump.center_omega() / 2.0;
    if (kind == PresetKind::Grid) {
        CrystalConfig crystal;
        crystal.medium = default_catalog().at("KTP");
        crystal.pm_type = PhaseMatching::TypeII_QPM;
        crystal.axes = {"x", "x", "z"};
        crystal.length = 1.0e-3;
        crystal = with_solved_poling(crystal, omega_deg, omega_deg);
        const double tau = 8.3e-12;
        const FrequencyGrid g = make_grid(1550e-9, grid_preset_span, n_points);
        return Setup{pump, crystal, grid_schedule(tau), LossModel{}, g, g, tau};
    }
    CrystalConfig crystal;
    crystal.medium = default_catalog().at("LiNbO3");
    crystal.pm_type = PhaseMatching::TypeII_AngleTuned;
    crystal.axes = {"e", "o", "e"};
    crystal.length = 1.0e-3;
    crystal.theta = pi / 6.0;
    const double tau = 1.0e-12;
    const FrequencyGrid g = make_grid(1550e-9, hde_preset_span, n_points);
    return Setup{pump, crystal, hde_schedule(tau), LossModel{}, g, g, tau};
}

} // namespace nlisim
