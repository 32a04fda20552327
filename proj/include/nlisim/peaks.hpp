#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "nlisim/spectral.hpp"

namespace nlisim {

/// Sub-sample location of a sampled maximum by a three-point parabola.
inline double refine_peak(std::span<const double> v, std::size_t k) {
    if (k == 0 || k + 1 >= v.size()) return static_cast<double>(k);
    const double l = v[k - 1], c = v[k], r = v[k + 1];
    const double denom = l - 2.0 * c + r;
    if (denom >= 0.0) return static_cast<double>(k);
    return static_cast<double>(k) + 0.5 * (l - r) / denom;
}

/// Interior local maxima at or above min_relative_height * max(v), as
/// fractional indices in ascending order. Plateaus report their left edge.
inline std::vector<double> find_peaks(std::span<const double> v, double min_relative_height) {
    std::vector<double> out;
    if (v.size() < 3) return out;
    const double threshold = min_relative_height * *std::max_element(v.begin(), v.end());
    for (std::size_t k = 1; k + 1 < v.size(); ++k)
        if (v[k] > v[k - 1] && v[k] >= v[k + 1] && v[k] >= threshold && v[k] > 0.0)
            out.push_back(refine_peak(v, k));
    return out;
}

/// Sum of m along lines of constant (s - i). Entry j corresponds to
/// s - i = j - (cols - 1).
inline std::vector<double> difference_profile(const RealMatrix& m) {
    const Eigen::Index rows = m.rows(), cols = m.cols();
    std::vector<double> out(static_cast<std::size_t>(rows + cols - 1), 0.0);
    for (Eigen::Index s = 0; s < rows; ++s)
        for (Eigen::Index i = 0; i < cols; ++i) out[static_cast<std::size_t>(s - i + cols - 1)] += m(s, i);
    return out;
}

struct Peak2D {
    double s; // fractional row
    double i; // fractional column
    double value;
};

/// Interior 8-neighbour local maxima above min_relative_height * max(m),
/// refined independently along each axis.
inline std::vector<Peak2D> find_peaks_2d(const RealMatrix& m, double min_relative_height) {
    std::vector<Peak2D> out;
    if (m.rows() < 3 || m.cols() < 3) return out;
    const double threshold = min_relative_height * m.maxCoeff();
    for (Eigen::Index s = 1; s + 1 < m.rows(); ++s)
        for (Eigen::Index i = 1; i + 1 < m.cols(); ++i) {
            const double c = m(s, i);
            if (!(c >= threshold && c > 0.0)) continue;
            bool is_max = true;
            for (int ds = -1; ds <= 1 && is_max; ++ds)
                for (int di = -1; di <= 1 && is_max; ++di) {
                    if (ds == 0 && di == 0) continue;
                    const double n = m(s + ds, i + di);
                    // strict on the "earlier" half so plateaus yield one peak
                    is_max = (ds < 0 || (ds == 0 && di < 0)) ? c > n : c >= n;
                }
            if (!is_max) continue;
            const double col[3] = {m(s - 1, i), c, m(s + 1, i)};
            const double row[3] = {m(s, i - 1), c, m(s, i + 1)};
            out.push_back({static_cast<double>(s - 1) + refine_peak(col, 1),
                           static_cast<double>(i - 1) + refine_peak(row, 1), c});
        }
    return out;
}

} // namespace nlisim
