#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "nlisim/config.hpp"
#include "nlisim/csv.hpp"
#include "nlisim/engine.hpp"
#include "nlisim/peaks.hpp"
#include "nlisim/schmidt.hpp"

namespace nlisim {

namespace fs = std::filesystem;

/// Record of one CLI run; written as manifest.json next to the outputs.
class RunManifest {
public:
    RunManifest(std::string command, const RunConfig& rc, fs::path dir)
        : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
        doc_["software"] = {{"name", "nlisim"}, {"version", version_string}};
        doc_["command"] = std::move(command);
        doc_["config"] = describe(rc);
    }

    const fs::path& dir() const noexcept { return dir_; }
    nlohmann::json& results() { return doc_["results"]; }
    const nlohmann::json& document() const noexcept { return doc_; }
    const std::vector<std::string>& outputs() const noexcept { return outputs_; }

    /// Registers a file relative to the run directory and returns its full path.
    fs::path file(const std::string& relative) {
        outputs_.push_back(relative);
        const fs::path p = dir_ / relative;
        fs::create_directories(p.parent_path());
        return p;
    }

    void finish() {
        outputs_.push_back("manifest.json");
        doc_["outputs"] = outputs_;
        doc_["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream out(dir_ / "manifest.json");
        out << doc_.dump(2) << '\n';
        if (!out) throw Error("cannot write manifest in '" + dir_.string() + "'");
    }

private:
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    nlohmann::json doc_;
    std::vector<std::string> outputs_;
};

namespace detail {

inline std::vector<double> wavelength_axis_nm(const FrequencyGrid& g) {
    std::vector<double> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = g.wavelength(k) * 1e9;
    return out;
}

inline constexpr const char* corner = "lambda_s_nm\\lambda_i_nm";

inline void write_plane(RunManifest& m, const std::string& name, const FrequencyGrid& gs, const FrequencyGrid& gi,
                        const RealMatrix& values) {
    csv::write_matrix(m.file(name), corner, wavelength_axis_nm(gs), wavelength_axis_nm(gi), values);
}

inline void write_spectral(const fs::path& path, const SpectralFunction& f) {
    csv::Table t{{"lambda_nm", "omega_rad_s", "re", "im", "abs2"}, {}};
    for (std::size_t k = 0; k < f.grid().size(); ++k)
        t.rows.push_back({f.grid().wavelength(k) * 1e9, f.grid().omega(k), f(k).real(), f(k).imag(), std::norm(f(k))});
    csv::write_table(path, t);
}

inline void write_modes(RunManifest& m, const std::string& prefix, const SchmidtDecomposition& d) {
    for (std::size_t k = 0; k < d.n_modes(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "mode_%03zu", k);
        write_spectral(m.file(prefix + name + "_signal.csv"), d.signal_modes[k]);
        write_spectral(m.file(prefix + name + "_idler.csv"), d.idler_modes[k]);
    }
}

inline nlohmann::json projection_summary(const Projection& p) {
    const FrequencyGrid& g = p.idler.grid();
    std::vector<double> inten(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) inten[k] = std::norm(p.idler(k));
    const auto peaks = find_peaks(inten, 0.05);
    nlohmann::json nm = nlohmann::json::array();
    for (double pk : peaks) nm.push_back(omega_to_wavelength(g.omega_min() + pk * g.spacing()) * 1e9);
    const double lambda = omega_to_wavelength(p.omega_s);
    return {{"selected_signal_nm", lambda * 1e9},
            {"selected_signal_omega_rad_s", p.omega_s},
            {"bin_width_rad_s", p.bin_width},
            {"bin_width_nm", lambda * lambda * p.bin_width / (2.0 * pi * speed_of_light) * 1e9},
            {"idler_peaks_nm", nm}};
}

inline void write_projection(RunManifest& m, const std::string& name, const Projection& p) {
    csv::Table t{{"lambda_i_nm", "intensity"}, {}};
    for (std::size_t k = 0; k < p.idler.grid().size(); ++k)
        t.rows.push_back({p.idler.grid().wavelength(k) * 1e9, std::norm(p.idler(k))});
    csv::write_table(m.file(name), t);
}

inline void write_coefficients(RunManifest& m, const std::string& name, const std::vector<double>& c) {
    csv::Table t{{"k", "c_k", "c_k_squared", "cumulative"}, {}};
    double cum = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        cum += c[k] * c[k];
        t.rows.push_back({static_cast<double>(k), c[k], c[k] * c[k], cum});
    }
    csv::write_table(m.file(name), t);
}

} // namespace detail

struct SimulateOptions {
    std::size_t max_mode_files = 16;
};

/// JSA/JSI, single-crystal factors, modulation map, Schmidt coefficients and modes.
inline RunManifest run_simulate(const RunConfig& rc, const fs::path& out_dir, const SimulateOptions& opt = {}) {
    const Setup& s = rc.setup;
    const JointAmplitude a = s.amplitude();
    const SchmidtDecomposition d = schmidt_decompose(a, RankCutoff{opt.max_mode_files});

    fs::create_directories(out_dir);
    RunManifest m("simulate", rc, out_dir);
    detail::write_plane(m, "jsi.csv", s.grid_s, s.grid_i, intensity(a));
    detail::write_plane(m, "jsa_real.csv", s.grid_s, s.grid_i, a.values().real());
    detail::write_plane(m, "jsa_imag.csv", s.grid_s, s.grid_i, a.values().imag());

    const JointAmplitude base = jsa0(s.pump, s.crystal, s.grid_s, s.grid_i);
    RealMatrix pef(s.grid_s.size(), s.grid_i.size());
    RealMatrix pmf(s.grid_s.size(), s.grid_i.size());
    for (std::size_t r = 0; r < s.grid_s.size(); ++r)
        for (std::size_t c = 0; c < s.grid_i.size(); ++c) {
            const double ws = s.grid_s.omega(r), wi = s.grid_i.omega(c);
            pef(r, c) = std::norm(pump_envelope(s.pump, ws + wi));
            pmf(r, c) = std::norm(phase_matching_function(s.crystal, ws, wi));
        }
    detail::write_plane(m, "pump_envelope.csv", s.grid_s, s.grid_i, pef);
    detail::write_plane(m, "phase_matching.csv", s.grid_s, s.grid_i, pmf);
    detail::write_plane(m, "jsi_unmodulated.csv", s.grid_s, s.grid_i, intensity(normalize(base)));
    detail::write_plane(m, "modulation.csv", s.grid_s, s.grid_i,
                        pseudo_normalized_modulation(s.schedule, s.loss, s.grid_s, s.grid_i));
    detail::write_coefficients(m, "schmidt_coefficients.csv", d.coefficients);
    detail::write_modes(m, "modes/", d);

    const double c12 = d.coefficients.size() > 1 ? d.coefficients[0] * d.coefficients[0] + d.coefficients[1] * d.coefficients[1]
                                                : d.coefficients[0] * d.coefficients[0];
    m.results() = {{"schmidt_number", schmidt_number(d)},
                   {"first_two_weight", c12},
                   {"modes_written", d.n_modes()}};
    if (s.crystal.pm_type == PhaseMatching::TypeII_AngleTuned) {
        const double w = s.pump.center_omega() / 2.0;
        m.results()["delta_k_at_degeneracy_rad_m"] = delta_k(s.crystal, w, w);
    }
    m.finish();
    return m;
}

/// Idler spectrum heralded by a signal detection at lambda_s.
inline RunManifest run_project(const RunConfig& rc, double lambda_s, const fs::path& out_dir) {
    const JointAmplitude a = rc.setup.amplitude();
    const Projection p = project_signal(a, lambda_s);
    fs::create_directories(out_dir);
    RunManifest m("project", rc, out_dir);
    detail::write_projection(m, "idler_projection.csv", p);
    m.results() = detail::projection_summary(p);
    m.finish();
    return m;
}

struct LossSweepOptions {
    std::vector<double> snapshots_db{0.0, 1.0, 3.0, 4.0, 10.0};
    std::size_t snapshot_modes = 2;
    double lambda_s = 1550e-9;
};

inline std::vector<double> linear_steps(double lo, double hi, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k)
        x[k] = k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return x;
}

/// Schmidt number and overlaps versus loss, plus JSI/mode/projection
/// snapshots at selected loss values.
inline RunManifest run_loss_sweep(const RunConfig& rc, double x_min, double x_max, std::size_t n_steps,
                                  const fs::path& out_dir, const LossSweepOptions& opt = {}) {
    if (!(x_min >= 0.0) || !(x_max >= x_min)) throw InvalidArgument("loss sweep needs 0 <= x_min <= x_max");
    if (n_steps < 2) throw InvalidArgument("loss sweep needs at least 2 steps");
    for (double x : opt.snapshots_db)
        if (!(x >= 0.0)) throw InvalidArgument("snapshot loss values must be >= 0");

    const std::vector<double> xs = linear_steps(x_min, x_max, n_steps);
    const auto rows = loss_sweep(rc.setup, xs);

    fs::create_directories(out_dir);
    RunManifest m("loss-sweep", rc, out_dir);
    csv::Table t{{"x_db", "schmidt_number", "overlap_lossless", "overlap_unmodulated"}, {}};
    for (const auto& r : rows) t.rows.push_back({r.x_db, r.schmidt_number, r.overlap_with_lossless, r.overlap_with_unmodulated});
    csv::write_table(m.file("loss_sweep.csv"), t);

    const double k_unmod = schmidt_number(schmidt_coefficients(rc.setup.unmodulated()));
    nlohmann::json snaps = nlohmann::json::array();
    for (double x : opt.snapshots_db) {
        Setup lossy = rc.setup;
        lossy.loss = LossModel{x};
        const JointAmplitude a = lossy.amplitude();
        char dir[64];
        std::snprintf(dir, sizeof dir, "loss_%.1fdB/", x);
        detail::write_plane(m, std::string(dir) + "jsi.csv", lossy.grid_s, lossy.grid_i, intensity(a));
        const SchmidtDecomposition d = schmidt_decompose(a, RankCutoff{opt.snapshot_modes, 1.0});
        detail::write_modes(m, dir, d);
        nlohmann::json snap{{"x_db", x}, {"schmidt_number", schmidt_number(d)}};
        if (lossy.grid_s.contains(wavelength_to_omega(opt.lambda_s))) {
            const Projection p = project_signal(a, opt.lambda_s);
            detail::write_projection(m, std::string(dir) + "idler_projection.csv", p);
            snap["projection"] = detail::projection_summary(p);
        }
        snaps.push_back(snap);
    }
    m.results() = {{"unmodulated_schmidt_number", k_unmod}, {"snapshots", snaps}};
    m.finish();
    return m;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyCheck {
    std::string name;
    std::size_t samples;
    double max_residual;
    bool passed;
};

struct VerifyReport {
    std::uint64_t seed;
    double tolerance;
    std::vector<VerifyCheck> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }

    std::string text() const {
        std::ostringstream out;
        char line[160];
        std::snprintf(line, sizeof line, "verify: seed %llu, tolerance %.1e (relative)\n",
                      static_cast<unsigned long long>(seed), tolerance);
        out << line;
        for (const auto& c : checks) {
            std::snprintf(line, sizeof line, "%s  %-28s max residual %.3e over %zu samples\n", c.passed ? "PASS" : "FAIL",
                          c.name.c_str(), c.max_residual, c.samples);
            out << line;
        }
        out << (passed() ? "all checks passed\n" : "verification FAILED\n");
        return out.str();
    }
};

using ScheduleFactory = std::function<DelaySchedule(double tau)>;

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::size_t omega_samples = 10000;
    std::size_t tau_samples = 10;
    std::size_t per_crystal_points = 100;
    double tolerance = 1e-12;
    double omega_lo = 1.0e15, omega_hi = 1.5e15; // rad/s, brackets the 1550 nm band
    double tau_lo = 0.5e-12, tau_hi = 10e-12;    // s
    ScheduleFactory grid_table = grid_schedule;
    ScheduleFactory hde_table = hde_schedule;
};

/// Schedule factory that rescales a fixed table recorded at fundamental delay tau0.
inline ScheduleFactory scaled_table(DelaySchedule table, double tau0) {
    return [table = std::move(table), tau0](double tau) {
        DelaySchedule s = table;
        const double f = tau / tau0;
        for (auto* v : {&s.tau_p, &s.tau_s, &s.tau_i})
            for (double& t : *v) t *= f;
        return s;
    };
}

/// Checks the product-sum modulation against both closed forms, then every
/// per-crystal phase factor against its expected (signal, idler) exponents.
inline VerifyReport run_verify(const VerifyOptions& opt = {}) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> omega(opt.omega_lo, opt.omega_hi);
    std::uniform_real_distribution<double> tau_dist(opt.tau_lo, opt.tau_hi);
    VerifyReport report{opt.seed, opt.tolerance, {}};
    const LossModel lossless{};

    using Closed = complex (*)(double, double, double);
    const std::array<std::tuple<const char*, const ScheduleFactory*, Closed>, 2> sums{{
        {"grid closed form", &opt.grid_table, &beta_grid_closed},
        {"hde closed form", &opt.hde_table, &beta_hde_closed},
    }};
    for (const auto& [name, table, closed] : sums) {
        double worst = 0.0;
        std::size_t n = 0;
        for (std::size_t t = 0; t < opt.tau_samples; ++t) {
            const double tau = tau_dist(rng);
            const DelaySchedule sched = (*table)(tau);
            if (sched.n_crystals() != 4) throw InvalidArgument("verify: closed forms describe four-crystal schedules");
            for (std::size_t k = 0; k < opt.omega_samples; ++k, ++n) {
                const double ws = omega(rng), wi = omega(rng);
                worst = std::max(worst, std::abs(beta_total(sched, lossless, ws, wi) - closed(tau, ws, wi)) / 4.0);
            }
        }
        report.checks.push_back({name, n, worst, worst < opt.tolerance});
    }

    // beta^(mu) = exp(i (a_s ws + a_i wi) tau)
    struct Exponents {
        long double a_s, a_i;
    };
    const std::array<Exponents, 4> grid_exp{{{1.5L, 1.5L}, {1.5L, 2.5L}, {1.0L, 2.0L}, {2.0L, 2.0L}}};
    const std::array<Exponents, 4> hde_exp{{{1.0L, 2.0L}, {2.0L, 1.0L}, {1.5L, 1.5L}, {1.5L, 1.5L}}};
    for (int family = 0; family < 2; ++family) {
        const auto& exps = family == 0 ? grid_exp : hde_exp;
        const ScheduleFactory& table = family == 0 ? opt.grid_table : opt.hde_table;
        for (std::size_t mu = 1; mu <= 4; ++mu) {
            double worst = 0.0;
            for (std::size_t k = 0; k < opt.per_crystal_points; ++k) {
                const double tau = tau_dist(rng);
                const double ws = omega(rng), wi = omega(rng);
                const DelaySchedule sched = table(tau);
                const complex expected = unit_phasor((exps[mu - 1].a_s * ws + exps[mu - 1].a_i * wi) * static_cast<long double>(tau));
                worst = std::max(worst, std::abs(beta_mu(sched, mu, ws, wi) - expected));
            }
            const std::string name = std::string(family == 0 ? "grid" : "hde") + " beta(" + std::to_string(mu) + ")";
            report.checks.push_back({name, opt.per_crystal_points, worst, worst < opt.tolerance});
        }
    }
    return report;
}

} // namespace nlisim
