#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>

#include "nlisim/constants.hpp"
#include "nlisim/errors.hpp"

namespace nlisim {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;

/// Uniform sampling of angular frequency, strictly increasing.
class FrequencyGrid {
public:
    FrequencyGrid(double omega_min, double omega_max, std::size_t n_points)
        : omega_min_(omega_min), omega_max_(omega_max), n_(n_points) {
        if (n_points < 2) throw InvalidArgument("FrequencyGrid needs at least 2 points");
        if (!(omega_min < omega_max) || !std::isfinite(omega_min) || !std::isfinite(omega_max))
            throw InvalidArgument("FrequencyGrid needs omega_min < omega_max");
        spacing_ = (omega_max - omega_min) / static_cast<double>(n_points - 1);
    }

    std::size_t size() const noexcept { return n_; }
    double omega_min() const noexcept { return omega_min_; }
    double omega_max() const noexcept { return omega_max_; }
    double spacing() const noexcept { return spacing_; }

    double omega(std::size_t k) const noexcept {
        // Last sample is pinned so the endpoint is reproduced exactly.
        if (k + 1 == n_) return omega_max_;
        return omega_min_ + static_cast<double>(k) * spacing_;
    }
    double wavelength(std::size_t k) const noexcept { return omega_to_wavelength(omega(k)); }

    /// Inclusive test with a half-cell margin at both ends.
    bool contains(double omega) const noexcept {
        return omega >= omega_min_ - 0.5 * spacing_ && omega <= omega_max_ + 0.5 * spacing_;
    }

    std::size_t nearest_index(double omega) const {
        if (!contains(omega)) throw RangeError("frequency outside grid");
        const double pos = std::round((omega - omega_min_) / spacing_);
        if (pos <= 0.0) return 0;
        return std::min(static_cast<std::size_t>(pos), n_ - 1);
    }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

private:
    double omega_min_;
    double omega_max_;
    std::size_t n_;
    double spacing_ = 0.0;
};

/// Grid spanning [center - span/2, center + span/2] in vacuum wavelength,
/// converted to angular frequency (ascending in omega).
inline FrequencyGrid make_grid(double center_wavelength, double span_wavelength, std::size_t n_points) {
    if (!(center_wavelength > 0.0)) throw InvalidArgument("make_grid: center wavelength must be positive");
    if (!(span_wavelength > 0.0)) throw InvalidArgument("make_grid: span must be positive");
    if (n_points < 2) throw InvalidArgument("make_grid: need at least 2 points");
    const double lambda_lo = center_wavelength - 0.5 * span_wavelength;
    const double lambda_hi = center_wavelength + 0.5 * span_wavelength;
    if (!(lambda_lo > 0.0)) throw InvalidArgument("make_grid: span exceeds twice the center wavelength");
    return FrequencyGrid(wavelength_to_omega(lambda_hi), wavelength_to_omega(lambda_lo), n_points);
}

namespace detail {

// Rotate so the largest-magnitude element is real-positive.
template <typename Derived>
void fix_global_phase(Eigen::MatrixBase<Derived>& m) {
    Eigen::Index best_r = 0, best_c = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double mag = std::abs(m(r, c));
            if (mag > best) {
                best = mag;
                best_r = r;
                best_c = c;
            }
        }
    if (best > 0.0) {
        const complex pivot = m(best_r, best_c);
        m *= std::conj(pivot) / best;
        m(best_r, best_c) = complex(std::abs(m(best_r, best_c)), 0.0);
    }
}

} // namespace detail

/// Complex amplitude over a (signal, idler) frequency plane.
/// Rows follow grid_s samples, columns follow grid_i samples.
class JointAmplitude {
public:
    JointAmplitude(FrequencyGrid grid_s, FrequencyGrid grid_i, ComplexMatrix values)
        : grid_s_(grid_s), grid_i_(grid_i), values_(std::move(values)) {
        if (static_cast<std::size_t>(values_.rows()) != grid_s_.size() ||
            static_cast<std::size_t>(values_.cols()) != grid_i_.size())
            throw InvalidArgument("JointAmplitude: matrix shape does not match grids");
    }

    const FrequencyGrid& grid_s() const noexcept { return grid_s_; }
    const FrequencyGrid& grid_i() const noexcept { return grid_i_; }
    const ComplexMatrix& values() const noexcept { return values_; }
    complex operator()(std::size_t s, std::size_t i) const {
        return values_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i));
    }

    double cell_area() const noexcept { return grid_s_.spacing() * grid_i_.spacing(); }

    /// Rectangle-rule integral of |A|^2.
    double weight() const { return values_.squaredNorm() * cell_area(); }

private:
    FrequencyGrid grid_s_;
    FrequencyGrid grid_i_;
    ComplexMatrix values_;
};

inline JointAmplitude normalize(const JointAmplitude& a) {
    const double w = a.weight();
    if (!(w > 0.0) || !std::isfinite(w)) throw DegenerateStateError("normalize: state has zero norm");
    ComplexMatrix v = a.values() / std::sqrt(w);
    detail::fix_global_phase(v);
    return JointAmplitude(a.grid_s(), a.grid_i(), std::move(v));
}

inline bool is_normalized(const JointAmplitude& a, double tol = 1e-10) {
    return std::abs(a.weight() - 1.0) <= tol;
}

inline RealMatrix intensity(const JointAmplitude& a) { return a.values().cwiseAbs2(); }

/// Single-photon spectral amplitude on one grid.
class SpectralFunction {
public:
    SpectralFunction(FrequencyGrid grid, ComplexVector values) : grid_(grid), values_(std::move(values)) {
        if (static_cast<std::size_t>(values_.size()) != grid_.size())
            throw InvalidArgument("SpectralFunction: length does not match grid");
    }

    const FrequencyGrid& grid() const noexcept { return grid_; }
    const ComplexVector& values() const noexcept { return values_; }
    complex operator()(std::size_t k) const { return values_(static_cast<Eigen::Index>(k)); }

    double weight() const { return values_.squaredNorm() * grid_.spacing(); }

private:
    FrequencyGrid grid_;
    ComplexVector values_;
};

inline SpectralFunction normalize(const SpectralFunction& f) {
    const double w = f.weight();
    if (!(w > 0.0) || !std::isfinite(w)) throw DegenerateStateError("normalize: spectral function has zero norm");
    ComplexVector v = f.values() / std::sqrt(w);
    detail::fix_global_phase(v);
    return SpectralFunction(f.grid(), std::move(v));
}

/// Rectangle-rule inner product <f|g>.
inline complex inner_product(const SpectralFunction& f, const SpectralFunction& g) {
    if (!(f.grid() == g.grid())) throw InvalidArgument("inner_product: grid mismatch");
    return f.values().dot(g.values()) * f.grid().spacing();
}

} // namespace nlisim
