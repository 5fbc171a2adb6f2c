// Small trajectory-analysis utilities shared by the dynamical modules and
// the harness: peak finding, angle unwrapping, log-slope fitting, resampling.
#ifndef CARLFEL_ANALYSIS_HPP
#define CARLFEL_ANALYSIS_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "carlfel/common.hpp"

namespace carlfel {

struct Peak {
    double t = 0.0;       // refined abscissa
    double height = 0.0;  // refined value
    std::size_t index = 0;
};

/// Local maxima of a uniformly sampled series (spacing dt, first sample at
/// t0), keeping only peaks at least rel_threshold of the global maximum.
/// Each peak is refined by a parabola through its three surrounding samples.
inline std::vector<Peak> find_peaks(std::span<const double> y, double dt,
                                    double rel_threshold = 0.25, double t0 = 0.0) {
    require(dt > 0 && finite(dt), "find_peaks: dt must be > 0");
    std::vector<Peak> peaks;
    if (y.size() < 3) return peaks;
    double global = y[0];
    for (double v : y) global = std::max(global, v);
    const double floor_level = rel_threshold * global;

    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] >= y[i - 1] && y[i] > y[i + 1] && y[i] >= floor_level)) continue;
        const double a = y[i - 1], b = y[i], c = y[i + 1];
        const double denom = a - 2.0 * b + c;
        double shift = 0.0, height = b;
        if (denom < 0.0) {  // strictly concave triple: refine
            shift = 0.5 * (a - c) / denom;
            height = b - 0.25 * (a - c) * shift;
        }
        peaks.push_back(
            {t0 + dt * (static_cast<double>(i) + shift), height, i});
    }
    return peaks;
}

/// First refined peak, if any.
inline std::optional<Peak> first_peak(std::span<const double> y, double dt,
                                      double rel_threshold = 0.25, double t0 = 0.0) {
    const auto peaks = find_peaks(y, dt, rel_threshold, t0);
    if (peaks.empty()) return std::nullopt;
    return peaks.front();
}

/// Remove 2 pi jumps so the sequence becomes continuous.
inline std::vector<double> unwrap_angles(std::span<const double> phi) {
    std::vector<double> out(phi.begin(), phi.end());
    double offset = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double d = phi[i] - phi[i - 1];
        if (d > 0.5 * two_pi) offset -= two_pi;
        else if (d < -0.5 * two_pi) offset += two_pi;
        out[i] = phi[i] + offset;
    }
    return out;
}

/// Least-squares slope of y(t); used for exponential-rate fits on log data.
inline double fit_slope(std::span<const double> t, std::span<const double> y) {
    require(t.size() == y.size() && t.size() >= 2,
            "fit_slope: need two equal-length samples at least");
    const auto n = static_cast<double>(t.size());
    const double st = pairwise_sum(t);
    const double sy = pairwise_sum(y);
    const double stt = pairwise_sum(t.size(), [&](std::size_t i) { return t[i] * t[i]; });
    const double sty = pairwise_sum(t.size(), [&](std::size_t i) { return t[i] * y[i]; });
    const double denom = n * stt - st * st;
    require(denom != 0.0, "fit_slope: degenerate abscissae");
    return (n * sty - st * sy) / denom;
}

/// Linear interpolation of a uniformly sampled series onto arbitrary times
/// (clamped to the sampled range).
inline double sample_linear(std::span<const double> y, double dt, double t,
                            double t0 = 0.0) {
    require(y.size() >= 2, "sample_linear: need at least two samples");
    const double pos = (t - t0) / dt;
    if (pos <= 0.0) return y.front();
    if (pos >= static_cast<double>(y.size() - 1)) return y.back();
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return y[i] * (1.0 - frac) + y[i + 1] * frac;
}

}  // namespace carlfel

#endif
