#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include "nlisim/constants.hpp"
#include "nlisim/engine.hpp"
#include "nlisim/errors.hpp"
#include "nlisim/spectral.hpp"

namespace nlisim {

/// Controls how many mode functions are materialized. Coefficients are
/// always returned in full; the cutoff only bounds the mode lists.
struct RankCutoff {
    std::size_t max_modes = std::numeric_limits<std::size_t>::max();
    double cumulative_weight = 1.0 - 1e-6; // stop once sum c_k^2 reaches this
};

struct SchmidtDecomposition {
    std::vector<double> coefficients; // descending, sum of squares = 1
    std::vector<SpectralFunction> signal_modes;
    std::vector<SpectralFunction> idler_modes;

    std::size_t n_modes() const noexcept { return signal_modes.size(); }
};

namespace detail {

inline ComplexMatrix weighted_matrix(const JointAmplitude& a) {
    if (!is_normalized(a, 1e-10)) throw ContractError("schmidt decomposition requires a normalized state");
    return a.values() * std::sqrt(a.cell_area());
}

inline void check_finite(const Eigen::VectorXd& s) {
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (!std::isfinite(s(k))) throw NumericError("SVD produced non-finite singular values");
}

} // namespace detail

/// Singular values of sqrt(dws dwi) A, without mode functions.
inline std::vector<double> schmidt_coefficients(const JointAmplitude& a) {
    const ComplexMatrix m = detail::weighted_matrix(a);
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");
    detail::check_finite(svd.singularValues());
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

/// A(ws, wi) = sum_k c_k psi_k(ws) phi_k(wi) with psi_k, phi_k orthonormal
/// under the rectangle rule. Each pair's phase is fixed so that the
/// largest-magnitude sample of psi_k is real-positive.
inline SchmidtDecomposition schmidt_decompose(const JointAmplitude& a, const RankCutoff& cutoff = {}) {
    const ComplexMatrix m = detail::weighted_matrix(a);
    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");
    const Eigen::VectorXd& s = svd.singularValues();
    detail::check_finite(s);

    SchmidtDecomposition d;
    d.coefficients.assign(s.data(), s.data() + s.size());

    std::size_t keep = 0;
    double cumulative = 0.0;
    while (keep < d.coefficients.size() && keep < cutoff.max_modes) {
        cumulative += d.coefficients[keep] * d.coefficients[keep];
        ++keep;
        if (cumulative >= cutoff.cumulative_weight) break;
    }

    const double ws_scale = 1.0 / std::sqrt(a.grid_s().spacing());
    const double wi_scale = 1.0 / std::sqrt(a.grid_i().spacing());
    const ComplexMatrix& u = svd.matrixU();
    const ComplexMatrix& v = svd.matrixV();
    for (std::size_t k = 0; k < keep; ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        ComplexVector psi = u.col(col) * ws_scale;
        ComplexVector phi = v.col(col).conjugate() * wi_scale;
        Eigen::Index at = 0;
        psi.cwiseAbs().maxCoeff(&at);
        const complex rot = std::abs(psi(at)) > 0.0 ? std::conj(psi(at)) / std::abs(psi(at)) : complex(1.0, 0.0);
        psi *= rot;
        phi *= std::conj(rot);
        d.signal_modes.emplace_back(a.grid_s(), std::move(psi));
        d.idler_modes.emplace_back(a.grid_i(), std::move(phi));
    }
    return d;
}

/// K = 1 / sum c_k^4.
inline double schmidt_number(std::span<const double> coefficients) {
    double sum4 = 0.0;
    for (double c : coefficients) sum4 += c * c * c * c;
    if (!(sum4 > 0.0)) throw DegenerateStateError("schmidt_number: all coefficients vanish");
    return 1.0 / sum4;
}

inline double schmidt_number(const SchmidtDecomposition& d) { return schmidt_number(d.coefficients); }

/// sum_k c_k psi_k(ws) phi_k(wi) over the materialized modes.
inline ComplexMatrix reconstruct(const SchmidtDecomposition& d) {
    if (d.signal_modes.empty()) return {};
    ComplexMatrix out = ComplexMatrix::Zero(d.signal_modes.front().values().size(), d.idler_modes.front().values().size());
    for (std::size_t k = 0; k < d.n_modes(); ++k)
        out += d.coefficients[k] * d.signal_modes[k].values() * d.idler_modes[k].values().transpose();
    return out;
}

/// Cosine similarity of two intensity distributions:
/// int |a|^2 |b|^2 / sqrt(int |a|^4 int |b|^4), so that overlap(a, a) = 1.
inline double intensity_overlap(const JointAmplitude& a, const JointAmplitude& b) {
    if (!(a.grid_s() == b.grid_s()) || !(a.grid_i() == b.grid_i()))
        throw InvalidArgument("intensity_overlap: grid mismatch");
    const RealMatrix ia = intensity(a);
    const RealMatrix ib = intensity(b);
    const double saa = ia.squaredNorm();
    const double sbb = ib.squaredNorm();
    if (!(saa > 0.0) || !(sbb > 0.0)) throw DegenerateStateError("intensity_overlap: zero state");
    const double num = (ia.array() * ib.array()).sum();
    return std::clamp(num / std::sqrt(saa * sbb), 0.0, 1.0);
}

/// Idler state heralded by detecting the signal in one grid bin.
struct Projection {
    SpectralFunction idler; // normalized
    std::size_t row;        // selected signal bin
    double omega_s;         // bin center, rad/s
    double bin_width;       // rad/s
};

inline Projection project_signal(const JointAmplitude& a, double lambda_s) {
    if (!(lambda_s > 0.0)) throw InvalidArgument("project_signal: wavelength must be positive");
    const double omega = wavelength_to_omega(lambda_s);
    if (!a.grid_s().contains(omega))
        throw RangeError("project_signal: signal wavelength " + std::to_string(lambda_s * 1e9) + " nm outside grid");
    const std::size_t row = a.grid_s().nearest_index(omega);
    ComplexVector v = a.values().row(static_cast<Eigen::Index>(row)).transpose();
    return Projection{normalize(SpectralFunction(a.grid_i(), std::move(v))), row, a.grid_s().omega(row),
                      a.grid_s().spacing()};
}

struct LossSweepRow {
    double x_db;
    double schmidt_number;
    double overlap_with_lossless;
    double overlap_with_unmodulated;
};

namespace detail {

// Runs body(k) for k in [0, n) on up to hardware_concurrency threads.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = next++; k < n; k = next++) body(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

/// Schmidt number and overlaps of the lossy state for each loss value.
/// The setup's own loss field is ignored; rows follow the input order.
inline std::vector<LossSweepRow> loss_sweep(const Setup& setup, std::span<const double> x_values) {
    for (double x : x_values) LossModel{x}.validate();
    const JointAmplitude base = jsa0(setup.pump, setup.crystal, setup.grid_s, setup.grid_i);
    const auto maps = crystal_phase_maps(setup.schedule, setup.grid_s, setup.grid_i);
    auto state_at = [&](double x) {
        return normalize(JointAmplitude(setup.grid_s, setup.grid_i,
                                        base.values().cwiseProduct(combine_phase_maps(maps, LossModel{x}))));
    };
    const JointAmplitude lossless = state_at(0.0);
    const JointAmplitude unmodulated = normalize(base);

    std::vector<LossSweepRow> rows(x_values.size());
    detail::parallel_for(x_values.size(), [&](std::size_t k) {
        const double x = x_values[k];
        const JointAmplitude state = state_at(x);
        rows[k] = LossSweepRow{x, schmidt_number(schmidt_coefficients(state)), intensity_overlap(state, lossless),
                               intensity_overlap(state, unmodulated)};
    });
    return rows;
}

} // namespace nlisim
